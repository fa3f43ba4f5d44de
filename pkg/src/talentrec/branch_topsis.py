"""Entropy-weighted TOPSIS branch over six occupation-side proxies."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .branch_cf import recency_weights
from .branch_rl import tokenize
from .resources import DIGITAL_TERMS, INNOVATION_TERMS, ROLE_CUES, STOP_WORDS
from .transitions import TransitionModel, min_max_normalize

CRITERIA = (
    "market_prevalence",
    "skill_breadth",
    "digital_skill_density",
    "innovation_intensity",
    "role_level",
    "transition_mobility",
)
N_CRITERIA = len(CRITERIA)
ENTROPY_EPS = 1e-9


@dataclass(frozen=True)
class LexiconConfig:
    digital_terms: frozenset[str] = DIGITAL_TERMS
    innovation_terms: frozenset[str] = INNOVATION_TERMS
    role_cues: dict = field(default_factory=lambda: dict(ROLE_CUES))

    def __post_init__(self):
        object.__setattr__(self, "digital_terms", frozenset(t.lower() for t in self.digital_terms))
        object.__setattr__(self, "innovation_terms", frozenset(t.lower() for t in self.innovation_terms))
        cues = {k.lower(): float(v) for k, v in self.role_cues.items()}
        if any(v <= 0 for v in cues.values()):
            raise ValueError("role cue scores must be positive")
        object.__setattr__(self, "role_cues", cues)

    @classmethod
    def from_files(cls, digital=None, innovation=None, role_cues=None) -> "LexiconConfig":
        kw = {}
        if digital:
            kw["digital_terms"] = frozenset(_term_lines(digital))
        if innovation:
            kw["innovation_terms"] = frozenset(_term_lines(innovation))
        if role_cues:
            cues = {}
            for line in _term_lines(role_cues):
                cue, score = line.split("\t")
                cues[cue.strip()] = float(score)
            kw["role_cues"] = cues
        return cls(**kw)


def _term_lines(path):
    lines = (ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines())
    return [ln for ln in lines if ln and not ln.startswith("#")]


@dataclass(frozen=True)
class CriterionMatrix:
    X: np.ndarray
    item_ids: tuple[str, ...]
    active: tuple[bool, ...] = (True,) * N_CRITERIA
    criterion_names: tuple[str, ...] = CRITERIA

    def __post_init__(self):
        if not np.all(np.isfinite(self.X)) or np.any(self.X < 0):
            raise ValueError("criterion matrix must be finite and non-negative")
        if not any(self.active):
            raise ValueError("at least one criterion must stay active")

    @property
    def active_columns(self) -> list[int]:
        return [j for j, a in enumerate(self.active) if a]

    @property
    def informative_columns(self) -> list[int]:
        """Active columns that actually vary across items."""
        return [j for j in self.active_columns if self.X[:, j].max() > self.X[:, j].min()]

    def dump(self, path) -> None:
        lines = ["occupation_id\t" + "\t".join(self.criterion_names)]
        for occ, row in zip(self.item_ids, self.X):
            lines.append(occ + "\t" + "\t".join(f"{v:.6f}" for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def deactivate_proxy(cm: CriterionMatrix, j: int) -> CriterionMatrix:
    if not cm.active[j]:
        return cm
    if sum(cm.active) <= 1:
        raise ValueError("cannot deactivate the last active criterion")
    active = list(cm.active)
    active[j] = False
    return replace(cm, active=tuple(active))


def reactivate_proxy(cm: CriterionMatrix, j: int) -> CriterionMatrix:
    active = list(cm.active)
    active[j] = True
    return replace(cm, active=tuple(active))


def _text_terms(item) -> list[str]:
    terms = []
    for s in item.skill_terms:
        terms.extend(tokenize(s))
    terms.extend(tokenize(item.description))
    return [t for t in terms if t not in STOP_WORDS]


def role_score(title: str, cues: dict) -> float:
    toks = set(tokenize(title))
    return max((v for c, v in cues.items() if c in toks), default=0.0)


def build_criterion_matrix(items, model: TransitionModel, lexicons: LexiconConfig = LexiconConfig()) -> CriterionMatrix:
    """Six proxy columns in fixed order; text columns read skills and description only."""
    ids = tuple(it.occupation_id for it in items)
    if ids != model.item_ids:
        raise ValueError("items must be in the transition model's index order")
    n = len(items)
    breadth = np.zeros(n)
    digital = np.zeros(n)
    innov = np.zeros(n)
    role = np.zeros(n)
    for k, it in enumerate(items):
        informative = {t for t in tokenize(it.description) if len(t) >= 4 and t not in STOP_WORDS}
        breadth[k] = len(it.skill_terms) + len(informative)
        terms = _text_terms(it)
        if terms:
            digital[k] = sum(t in lexicons.digital_terms for t in terms) / len(terms)
        innov[k] = len(set(terms) & lexicons.innovation_terms)
        role[k] = role_score(it.title, lexicons.role_cues)
    mobility = (model.counts > 0).sum(axis=1).astype(float)
    X = np.column_stack(
        [
            model.popularity,
            min_max_normalize(breadth),
            digital,
            min_max_normalize(innov),
            min_max_normalize(role),
            min_max_normalize(mobility),
        ]
    )
    return CriterionMatrix(X, ids)


def _as_matrix(X) -> CriterionMatrix:
    if isinstance(X, CriterionMatrix):
        return X
    X = np.asarray(X, dtype=float)
    return CriterionMatrix(X, tuple(str(i) for i in range(X.shape[0])), (True,) * X.shape[1], tuple(f"c{j}" for j in range(X.shape[1])))


def entropy_weights(X) -> np.ndarray:
    """Entropy weights over active columns (zeros elsewhere).

    Constant columns carry no information and get weight exactly 0; if every
    active column is constant the weights fall back to uniform.
    """
    cm = _as_matrix(X)
    m, n = cm.X.shape
    d = np.zeros(n)
    informative = set(cm.informative_columns)
    for j in cm.active_columns:
        if j not in informative or m < 2:
            continue
        col = cm.X[:, j] + ENTROPY_EPS
        p = col / col.sum()
        e = -(p * np.log(p)).sum() / np.log(m)
        d[j] = max(1.0 - e, 0.0)
    total = 0.0
    for j in range(n):
        total += d[j]
    if total <= 0:
        # divergence can underflow on near-constant columns; constant ones stay at 0
        cols = [j for j in cm.active_columns if j in informative] or list(cm.active_columns)
        w = np.zeros(n)
        w[cols] = 1.0 / len(cols)
        return w
    return d / total


def _simplex_rows(P: np.ndarray, cols: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Normalize rows of P over ``cols`` (column-ordered sum); return (weights, row_total)."""
    total = np.zeros(P.shape[0])
    for j in cols:
        total = total + P[:, j]
    W = np.zeros_like(P)
    ok = total > 0
    for j in cols:
        W[ok, j] = P[ok, j] / total[ok]
    return W, total


def user_weights(prefix_idx: Sequence[int], X, decay: float = 0.8, w_global=None) -> np.ndarray:
    """Recency-weighted criterion profile of a prefix, as a simplex over informative columns."""
    cm = _as_matrix(X)
    rho = recency_weights(len(prefix_idx), decay)
    H = np.zeros((1, cm.X.shape[0]))
    np.add.at(H[0], list(prefix_idx), rho)
    return user_weights_batch(H, cm, w_global)[0]


def user_weights_batch(H: np.ndarray, X, w_global=None) -> np.ndarray:
    cm = _as_matrix(X)
    if w_global is None:
        w_global = entropy_weights(cm)
    W, total = _simplex_rows(H @ cm.X, cm.informative_columns)
    W[total <= 0] = w_global
    return W


def mix_weights(w_user, w_global, alpha: float) -> np.ndarray:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * np.asarray(w_user) + (1 - alpha) * np.asarray(w_global)


def _normalized_columns(cm: CriterionMatrix, normalization: str) -> np.ndarray:
    R = np.zeros_like(cm.X)
    for j in cm.active_columns:
        col = cm.X[:, j]
        if normalization == "vector":
            norm = np.sqrt((col * col).sum())
            if norm > 0:
                R[:, j] = col / norm
        elif normalization == "minmax":
            R[:, j] = min_max_normalize(col)
        else:
            raise ValueError(f"unknown normalization {normalization!r}")
    return R


def topsis_closeness_batch(X, W: np.ndarray, normalization: str = "vector") -> np.ndarray:
    """Relative closeness D- / (D+ + D-) for each weight row in W (users x items).

    All criteria are benefit criteria; a zero total distance gives 0.5.
    """
    cm = _as_matrix(X)
    W = np.atleast_2d(np.asarray(W, dtype=float))
    R = _normalized_columns(cm, normalization)
    dplus = np.zeros((W.shape[0], cm.X.shape[0]))
    dminus = np.zeros_like(dplus)
    for j in cm.active_columns:
        r = R[:, j]
        v = W[:, j, None] * r[None, :]
        dplus += (v - W[:, j, None] * r.max()) ** 2
        dminus += (v - W[:, j, None] * r.min()) ** 2
    dplus = np.sqrt(dplus)
    dminus = np.sqrt(dminus)
    denom = dplus + dminus
    out = np.full_like(denom, 0.5)
    ok = denom > 0
    out[ok] = dminus[ok] / denom[ok]
    return out


def topsis_closeness(X, w, normalization: str = "vector") -> np.ndarray:
    return topsis_closeness_batch(X, np.asarray(w, dtype=float)[None, :], normalization)[0]


def topsis_scores(X, w, normalization: str = "vector") -> np.ndarray:
    """TOPSIS closeness, min-max normalized for fusion."""
    return min_max_normalize(topsis_closeness(X, w, normalization))
