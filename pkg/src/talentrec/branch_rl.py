"""Occupation-family bandit branch."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .branch_cf import history_matrix, recency_weights
from .resources import FALLBACK_FAMILY, FAMILY_KEYWORDS, FAMILY_NAMES
from .transitions import min_max_normalize, min_max_rows

N_FAMILIES = len(FAMILY_NAMES)


def tokenize(text: str) -> list[str]:
    return [t for t in re.split(r"[^0-9a-z]+", text.lower()) if t]


def family_from_title(title: str) -> int:
    """Keyword-rule family assignment (illustrative default, not canonical)."""
    tokens = tokenize(title)
    joined = " " + " ".join(tokens) + " "
    tokset = set(tokens)
    for fam, keywords in FAMILY_KEYWORDS:
        for kw in keywords:
            if (" " in kw and f" {kw} " in joined) or kw in tokset:
                return fam
    return FALLBACK_FAMILY


@dataclass(frozen=True)
class FamilyTaxonomy:
    family_of: Mapping[str, int]
    family_names: tuple[str, ...] = FAMILY_NAMES

    def __post_init__(self):
        if len(self.family_names) != N_FAMILIES:
            raise ValueError(f"taxonomy needs exactly {N_FAMILIES} families")
        for occ, f in self.family_of.items():
            if not 0 <= f < N_FAMILIES:
                raise ValueError(f"occupation {occ!r}: family index {f} out of range")

    def families(self, item_ids: Sequence[str]) -> np.ndarray:
        try:
            return np.array([self.family_of[o] for o in item_ids], dtype=np.int64)
        except KeyError as e:
            raise KeyError(f"occupation {e.args[0]!r} has no family") from None

    @classmethod
    def from_titles(cls, items) -> "FamilyTaxonomy":
        return cls({it.occupation_id: family_from_title(it.title) for it in items})

    @classmethod
    def from_file(cls, path, items=None) -> "FamilyTaxonomy":
        """Read ``occupation_id<TAB>family_name`` lines; items missing from the file use title rules."""
        lookup = {n.lower(): k for k, n in enumerate(FAMILY_NAMES)}
        mapping = {}
        for no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{no}: expected occupation_id<TAB>family_name")
            name = parts[1].strip().lower()
            if name not in lookup:
                raise ValueError(f"{path}:{no}: unknown family {parts[1].strip()!r}")
            mapping[parts[0].strip()] = lookup[name]
        if items is not None:
            for it in items:
                mapping.setdefault(it.occupation_id, family_from_title(it.title))
        return cls(mapping)


@dataclass(frozen=True)
class RLConfig:
    eta: float = 0.2
    reward_pos: float = 1.0
    reward_neg: float = -0.2
    negatives_per_positive: int = 2
    passes: int = 30
    omega: float = 0.7
    mix_family: float = 0.75
    mix_pop: float = 0.25
    decay: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if abs(self.mix_family + self.mix_pop - 1.0) > 1e-12:
            raise ValueError("mix_family + mix_pop must equal 1")


def bandit_update(q: float, reward: float, eta: float) -> float:
    """One-step value update toward the reward, with no future-value term."""
    return q + eta * (reward - q)


def _family_pairs(train_prefixes, family_of: Mapping[str, int]):
    src, dst = [], []
    for prefix in train_prefixes:
        fams = [family_of[o] for o in prefix]
        src.extend(fams[:-1])
        dst.extend(fams[1:])
    return src, dst


def train_bandit(train_prefixes: Sequence[Sequence[str]], taxonomy: FamilyTaxonomy, config: RLConfig = RLConfig()):
    """Train the family-to-family value table; rows are min-max normalized at the end."""
    src, dst = _family_pairs(train_prefixes, taxonomy.family_of)
    return _train(src, dst, config)


def train_bandit_indexed(prefixes: Sequence[Sequence[int]], item_families: np.ndarray, config: RLConfig = RLConfig()):
    src, dst = [], []
    for idx in prefixes:
        fams = item_families[list(idx)].tolist()
        src.extend(fams[:-1])
        dst.extend(fams[1:])
    return _train(src, dst, config)


def _train(src: list[int], dst: list[int], config: RLConfig, normalize: bool = True) -> np.ndarray:
    n = len(src)
    if n == 0:
        raise ValueError("empty corpus: no adjacent training pairs")
    F = N_FAMILIES
    k = config.negatives_per_positive
    rng = np.random.default_rng(config.seed)
    q = [0.0] * (F * F)
    eta, r_pos, r_neg = config.eta, config.reward_pos, config.reward_neg
    dst_arr = np.asarray(dst)
    for _ in range(config.passes):
        if k:
            # uniform over the F - 1 families other than the observed one
            draw = rng.integers(0, F - 1, size=(n, k))
            neg = (draw + (draw >= dst_arr[:, None])).tolist()
        for p in range(n):
            row = src[p] * F
            c = row + dst[p]
            q[c] += eta * (r_pos - q[c])
            if k:
                for a in neg[p]:
                    c = row + a
                    q[c] += eta * (r_neg - q[c])
    Q = np.array(q).reshape(F, F)
    return min_max_rows(Q) if normalize else Q


def family_bias(prefix_families: Sequence[int], decay: float = 0.8) -> np.ndarray:
    """Recency-weighted family composition of a prefix, min-max normalized."""
    if len(prefix_families) == 0:
        raise ValueError("prefix must be non-empty")
    b = np.zeros(N_FAMILIES)
    np.add.at(b, list(prefix_families), recency_weights(len(prefix_families), decay))
    return min_max_normalize(b)


def score_rl(
    prefix: Sequence[str],
    Q: np.ndarray,
    popularity: np.ndarray,
    item_ids: Sequence[str],
    taxonomy: FamilyTaxonomy,
    config: RLConfig = RLConfig(),
) -> np.ndarray:
    fams = taxonomy.families(prefix)
    b = family_bias(fams, config.decay)
    g = config.omega * Q[fams[-1]] + (1 - config.omega) * b
    item_fam = taxonomy.families(item_ids)
    s = config.mix_family * g[item_fam] + config.mix_pop * np.asarray(popularity)
    return min_max_normalize(s)


def score_rl_batch(
    prefixes: Sequence[Sequence[int]],
    Q: np.ndarray,
    popularity: np.ndarray,
    item_families: np.ndarray,
    config: RLConfig = RLConfig(),
) -> np.ndarray:
    onehot = np.eye(N_FAMILIES)[item_families]
    B = min_max_rows(history_matrix(prefixes, len(item_families), config.decay) @ onehot)
    last_fam = item_families[[p[-1] for p in prefixes]]
    G = config.omega * Q[last_fam] + (1 - config.omega) * B
    S = config.mix_family * G[:, item_families] + config.mix_pop * popularity[None, :]
    return min_max_rows(S)
