"""Deterministic synthetic career-history benchmarks with controllable persistence."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .benchmark import (
    DEFAULT_SEEDS,
    BenchmarkPackage,
    DegenerateBenchmarkError,
    FilterConfig,
    OccupationRecord,
    UserHistory,
    apply_filters,
    build_package,
)
from .resources import DIGITAL_TERMS, FAMILY_TITLES, INNOVATION_TERMS

N_FAMILIES = 6

_FAMILY_VOCAB = {
    0: ["application", "backend", "coding", "programming", "testing", "java", "python", "microservices", "api"],
    1: ["network", "firewall", "server", "linux", "virtualization", "cybersecurity", "support", "incident", "cloud"],
    2: ["analytics", "statistics", "sql", "spark", "modelling", "dashboard", "etl", "forecasting", "ai"],
    3: ["interface", "usability", "prototype", "html", "css", "javascript", "accessibility", "frontend", "visual"],
    4: ["circuit", "firmware", "embedded", "sensor", "plc", "scada", "robotics", "iot", "automation"],
    5: ["budget", "stakeholder", "roadmap", "planning", "governance", "vendor", "agile", "scrum", "portfolio"],
}
_GENERIC = [
    "team", "client", "quality", "documentation", "reporting", "customer", "process", "maintenance",
    "review", "training", "operations", "standards", "coordination", "requirements", "delivery",
]
_SKILL_POOL = sorted(DIGITAL_TERMS | {"communication", "teamwork", "leadership", "negotiation", "mentoring"})


class InfeasibleConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 600
    n_items: int = 24
    n_families: int = N_FAMILIES
    p_stay: float = 0.3
    family_kernel: tuple[tuple[float, ...], ...] | None = None  # None = uniform
    sequence_length_range: tuple[int, int] = (3, 5)
    text_richness: float = 0.5
    popularity_skew: float = 0.0  # Zipf exponent of within-family item choice
    seed: int = 0
    split_seeds: tuple[int, ...] = DEFAULT_SEEDS

    def __post_init__(self):
        if not 1 <= self.n_families <= N_FAMILIES:
            raise ValueError(f"n_families must be in 1..{N_FAMILIES}")
        if self.n_items < self.n_families:
            raise ValueError("need at least one item per family")
        if not 0.0 <= self.p_stay <= 1.0:
            raise ValueError("p_stay must lie in [0, 1]")
        lo, hi = self.sequence_length_range
        if lo < 3 or hi < lo:
            raise ValueError("sequence_length_range must satisfy 3 <= min <= max")
        K = self.kernel()
        if K.shape != (self.n_families, self.n_families) or np.any(K < 0) or not np.allclose(K.sum(axis=1), 1.0):
            raise ValueError("family_kernel must be a row-stochastic n_families x n_families matrix")

    def kernel(self) -> np.ndarray:
        if self.family_kernel is None:
            return np.full((self.n_families, self.n_families), 1.0 / self.n_families)
        return np.asarray(self.family_kernel, dtype=float)


def banded_kernel(stay: float, forward: float, n: int = N_FAMILIES) -> tuple[tuple[float, ...], ...]:
    """Family hops: stay in family w.p. ``stay``, move to the next family w.p. ``forward``, rest spread."""
    rest = (1.0 - stay - forward) / (n - 2)
    K = np.full((n, n), rest)
    for f in range(n):
        K[f, f] = stay
        K[f, (f + 1) % n] = forward
    return tuple(tuple(r) for r in K)


def cyclic_kernel(n: int = N_FAMILIES) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(1.0 if g == (f + 1) % n else 0.0 for g in range(n)) for f in range(n))


PRESETS = {
    "regime-jobhop": SynthConfig(
        n_users=2778,
        n_items=47,
        p_stay=0.22,
        family_kernel=banded_kernel(0.45, 0.35),
        sequence_length_range=(3, 5),
        text_richness=0.8,
        popularity_skew=0.5,
        seed=1,
    ),
    "regime-karrierewege": SynthConfig(
        n_users=2617,
        n_items=35,
        p_stay=0.65,
        family_kernel=banded_kernel(0.15, 0.3),
        sequence_length_range=(3, 5),
        text_richness=0.3,
        popularity_skew=0.7,
        seed=2,
    ),
    # target choice driven mostly by item prevalence; used by the proxy sensitivity analysis
    "regime-prevalence": SynthConfig(
        n_users=2000,
        n_items=30,
        p_stay=0.1,
        family_kernel=None,
        sequence_length_range=(3, 5),
        text_richness=0.5,
        popularity_skew=1.5,
        seed=3,
    ),
}


def preset(name: str, **overrides) -> SynthConfig:
    try:
        cfg = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _titles(n_items: int, n_families: int) -> list[tuple[str, int]]:
    out = []
    used = {f: 0 for f in range(n_families)}
    for k in range(n_items):
        f = k % n_families
        pool = FAMILY_TITLES[f]
        j = used[f]
        used[f] += 1
        title = pool[j] if j < len(pool) else f"{pool[j % len(pool)]} level {j // len(pool) + 1}"
        out.append((title, f))
    return out


def _make_items(cfg: SynthConfig) -> tuple[list[OccupationRecord], np.ndarray]:
    rng = np.random.default_rng([cfg.seed, 0])
    items, fams = [], []
    innov = sorted(INNOVATION_TERMS)
    for k, (title, f) in enumerate(_titles(cfg.n_items, cfg.n_families)):
        n_desc = int(round(cfg.text_richness * rng.integers(4, 17)))
        pool = _FAMILY_VOCAB[f] + _GENERIC + innov
        words = list(rng.choice(pool, size=n_desc)) if n_desc else []
        n_skill = int(round(cfg.text_richness * rng.integers(2, 11)))
        skills = tuple(rng.choice(_SKILL_POOL, size=n_skill, replace=False)) if n_skill else ()
        items.append(OccupationRecord(f"occ{k:03d}", title, " ".join(words), skills))
        fams.append(f)
    return items, np.array(fams)


def _within_family_weights(fams: np.ndarray, skew: float) -> np.ndarray:
    w = np.zeros(len(fams))
    for f in np.unique(fams):
        members = np.flatnonzero(fams == f)
        w[members] = 1.0 / np.arange(1, len(members) + 1) ** skew
    return w


def _walk(rng, length, p_stay, K, fams, weights, members):
    def draw_in(f, exclude=None):
        cand = members[f] if exclude is None else members[f][members[f] != exclude]
        if cand.size == 0:
            return None
        p = weights[cand] / weights[cand].sum()
        return int(cand[rng.choice(cand.size, p=p)])

    cur = draw_in(int(rng.integers(K.shape[0])))
    seq = [cur]
    while len(seq) < length:
        if rng.random() < p_stay:
            seq.append(cur)
            continue
        f = int(rng.choice(K.shape[0], p=K[fams[cur]]))
        nxt = draw_in(f, exclude=cur)
        if nxt is None:
            # single-item family drawn from itself: move anywhere else
            others = np.flatnonzero(np.arange(len(fams)) != cur)
            nxt = int(rng.choice(others)) if others.size else cur
        seq.append(nxt)
        cur = nxt
    return seq


def generate(cfg: SynthConfig, name: str = "custom") -> BenchmarkPackage:
    items, fams = _make_items(cfg)
    weights = _within_family_weights(fams, cfg.popularity_skew)
    members = {f: np.flatnonzero(fams == f) for f in range(cfg.n_families)}
    K = cfg.kernel()
    lo, hi = cfg.sequence_length_range
    histories = []
    for u in range(cfg.n_users):
        rng = np.random.default_rng([cfg.seed, 1, u])
        length = int(rng.integers(lo, hi + 1))
        seq = _walk(rng, length, cfg.p_stay, K, fams, weights, members)
        histories.append(UserHistory(f"u{u:05d}", tuple(items[k].occupation_id for k in seq)))

    filters = FilterConfig()
    try:
        kept_h, kept_i, audit = apply_filters(histories, items, filters)
    except DegenerateBenchmarkError:
        raise InfeasibleConfigError("config cannot satisfy default filters; increase n_users") from None
    if len(kept_h) != len(histories) or len(kept_i) != len(items):
        dropped = [o for o, _ in audit.dropped_occupations][:5]
        raise InfeasibleConfigError(
            f"config cannot satisfy default filters (e.g. occupations {dropped} below support); "
            "increase n_users or reduce popularity_skew"
        )
    meta = {"synthetic": {"preset": name, **_config_json(cfg)}}
    return build_package(
        histories, items, cfg.split_seeds, source=f"synthetic:{name}", filters=filters, extra=meta, created_at=None
    )


def _config_json(cfg: SynthConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["family_kernel"] = None if cfg.family_kernel is None else [list(r) for r in cfg.family_kernel]
    d["sequence_length_range"] = list(cfg.sequence_length_range)
    d["split_seeds"] = list(cfg.split_seeds)
    return d


def stay_rate(histories: Sequence[UserHistory]) -> float:
    stays = moves = 0
    for h in histories:
        for a, b in zip(h.sequence, h.sequence[1:]):
            moves += 1
            stays += a == b
    return stays / moves if moves else 0.0
