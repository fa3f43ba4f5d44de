"""Target ranking and top-5 metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

K = 5


@dataclass(frozen=True)
class RankingOutcome:
    user_id: str
    target_id: str
    rank: int


def rank_target(scores, target: int) -> int:
    """1-based rank with ties broken by ascending item index (== ascending occupation id)."""
    scores = np.asarray(scores)
    s = scores[target]
    return 1 + int((scores > s).sum()) + int((scores[:target] == s).sum())


def rank_targets(S: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Row-wise ``rank_target`` for a users x items score matrix."""
    S = np.asarray(S)
    targets = np.asarray(targets)
    t = S[np.arange(S.shape[0]), targets][:, None]
    before = np.arange(S.shape[1])[None, :] < targets[:, None]
    return 1 + (S > t).sum(axis=1) + ((S == t) & before).sum(axis=1)


def metrics_at_5(rank: int) -> tuple[float, float, float]:
    """(hit, ndcg, reciprocal rank) for a single relevant item at ``rank``."""
    if rank > K:
        return 0.0, 0.0, 0.0
    return 1.0, 1.0 / math.log2(rank + 1), 1.0 / rank


# lookup table so vectorized and scalar paths return identical floats
_TABLE = np.array([metrics_at_5(r) for r in range(1, K + 1)] + [(0.0, 0.0, 0.0)])


def metric_arrays(ranks: np.ndarray) -> dict[str, np.ndarray]:
    ranks = np.asarray(ranks)
    rows = _TABLE[np.minimum(ranks, K + 1) - 1]
    return {"hr": rows[:, 0], "ndcg": rows[:, 1], "mrr": rows[:, 2], "precision": rows[:, 0] / K}


def mean_metrics(ranks: np.ndarray) -> dict[str, float]:
    return {k: float(v.mean()) for k, v in metric_arrays(ranks).items()}


def mean_ndcg(S: np.ndarray, targets: np.ndarray) -> float:
    ranks = rank_targets(S, targets)
    return float(_TABLE[np.minimum(ranks, K + 1) - 1, 1].mean())
