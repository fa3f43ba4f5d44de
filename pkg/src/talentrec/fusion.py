"""Late fusion of branch scores and validation-driven weight selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .metrics import mean_ndcg

ALPHA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
CF_GRID = tuple(round(0.1 * k, 1) for k in range(8))  # 0.0 .. 0.7
RL_GRID = tuple(round(0.1 * k, 1) for k in range(6))  # 0.0 .. 0.5
MODES = ("full", "cf_topsis", "rl_topsis")


@dataclass(frozen=True)
class FusionWeights:
    lambda_cf: float
    lambda_rl: float
    lambda_t: float

    def __post_init__(self):
        if min(self.lambda_cf, self.lambda_rl, self.lambda_t) < 0:
            raise ValueError("fusion weights must be non-negative")
        if abs(self.lambda_cf + self.lambda_rl + self.lambda_t - 1.0) > 1e-12:
            raise ValueError("fusion weights must sum to one")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lambda_cf, self.lambda_rl, self.lambda_t)


def fuse(s_cf, s_rl, s_t, w: FusionWeights) -> np.ndarray:
    s_cf, s_rl, s_t = (np.asarray(a, dtype=float) for a in (s_cf, s_rl, s_t))
    if not s_cf.shape == s_rl.shape == s_t.shape:
        raise ValueError("branch score vectors must have the same shape")
    return w.lambda_cf * s_cf + w.lambda_rl * s_rl + w.lambda_t * s_t


def enumerate_lambda_grid(mode: str = "full", cf_grid=CF_GRID, rl_grid=RL_GRID) -> list[FusionWeights]:
    if mode not in MODES:
        raise ValueError(f"unknown fusion mode {mode!r}")
    cf_vals = (0.0,) if mode == "rl_topsis" else cf_grid
    rl_vals = (0.0,) if mode == "cf_topsis" else rl_grid
    out = []
    for a in cf_vals:
        for b in rl_vals:
            if a + b <= 1.0 + 1e-12:
                out.append(FusionWeights(a, b, round(1.0 - a - b, 10)))
    return out


@dataclass
class SelectionResult:
    chosen: FusionWeights
    chosen_alpha: float
    validation_metric: float
    grid_trace: list[tuple[FusionWeights, float, float]] = field(default_factory=list)
    alpha_trace: list[tuple[float, float]] = field(default_factory=list)


def select_alpha(topsis_by_alpha: Mapping[float, np.ndarray], targets, objective: Callable = mean_ndcg):
    """Alpha maximizing the TOPSIS-only validation objective; ties go to the smaller alpha."""
    trace = [(a, objective(topsis_by_alpha[a], targets)) for a in sorted(topsis_by_alpha)]
    best = max(trace, key=lambda t: (t[1], -t[0]))
    return best[0], trace


def select_lambdas(
    s_cf: np.ndarray,
    s_rl: np.ndarray,
    s_t: np.ndarray,
    targets,
    grid: Sequence[FusionWeights],
    objective: Callable = mean_ndcg,
):
    """Grid point maximizing the fused validation objective.

    Ties prefer larger lambda_cf, then larger lambda_t.
    """
    if len(targets) == 0:
        raise ValueError("empty validation set")
    trace = [(w, objective(fuse(s_cf, s_rl, s_t, w), targets)) for w in grid]
    best = max(trace, key=lambda t: (t[1], t[0].lambda_cf, t[0].lambda_t))
    return best[0], best[1], trace


def select(
    s_cf: np.ndarray,
    s_rl: np.ndarray,
    topsis_by_alpha: Mapping[float, np.ndarray],
    targets,
    mode: str = "full",
    objective: Callable = mean_ndcg,
    alpha: float | None = None,
) -> SelectionResult:
    """Two-stage selection: alpha on TOPSIS-only, then fusion weights with alpha held fixed."""
    if len(targets) == 0:
        raise ValueError("empty validation set")
    alpha_trace = []
    if alpha is None:
        alpha, alpha_trace = select_alpha(topsis_by_alpha, targets, objective)
    w, metric, trace = select_lambdas(s_cf, s_rl, topsis_by_alpha[alpha], targets, enumerate_lambda_grid(mode), objective)
    return SelectionResult(w, alpha, metric, [(g, alpha, m) for g, m in trace], alpha_trace)
