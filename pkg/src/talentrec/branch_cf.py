"""Transition-aware collaborative branch."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .transitions import TransitionModel, min_max_normalize, min_max_rows


@dataclass(frozen=True)
class CFConfig:
    beta: float = 0.85
    gamma: float = 0.7
    decay: float = 0.8

    def __post_init__(self):
        if not (0.0 <= self.beta <= 1.0 and 0.0 <= self.gamma <= 1.0):
            raise ValueError("beta and gamma must lie in [0, 1]")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must lie in (0, 1]")


def recency_weights(T: int, decay: float) -> np.ndarray:
    """Normalized weights decay**(T - t) for t = 1..T, most recent last."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if not 0.0 < decay <= 1.0:
        raise ValueError("decay must lie in (0, 1]")
    w = decay ** np.arange(T - 1, -1, -1, dtype=float)
    return w / w.sum()


def history_matrix(prefixes: Sequence[Sequence[int]], n_items: int, decay: float) -> np.ndarray:
    """Row u holds the recency weight mass that user u's prefix puts on each item."""
    H = np.zeros((len(prefixes), n_items))
    for u, idx in enumerate(prefixes):
        np.add.at(H[u], list(idx), recency_weights(len(idx), decay))
    return H


def _normalized_tables(model: TransitionModel):
    last = np.where(model.fallback_rows[:, None], model.popularity[None, :], model.probs)
    return min_max_rows(last), min_max_rows(model.probs), min_max_rows(model.sims)


def score_cf(prefix: Sequence[str], model: TransitionModel, config: CFConfig = CFConfig()) -> np.ndarray:
    """Collaborative score vector over the full item universe for one prefix.

    The last-state term uses the item-Markov row (popularity backoff for cold
    rows); the history term mixes recency-weighted transition and similarity rows.
    """
    if len(prefix) == 0:
        raise ValueError("prefix must be non-empty")
    idx = model.index(prefix)
    rho = recency_weights(len(idx), config.decay)
    last = min_max_normalize(model.last_state_row(idx[-1]))
    trans = sum(r * min_max_normalize(model.probs[j]) for r, j in zip(rho, idx))
    sim = sum(r * min_max_normalize(model.sims[j]) for r, j in zip(rho, idx))
    s = config.beta * last + (1 - config.beta) * (config.gamma * trans + (1 - config.gamma) * sim)
    return min_max_normalize(s)


def score_cf_batch(
    prefixes: Sequence[Sequence[int]], model: TransitionModel, config: CFConfig = CFConfig()
) -> np.ndarray:
    """Vectorized ``score_cf`` over many index-encoded prefixes (users x items)."""
    last_t, prob_t, sim_t = _normalized_tables(model)
    H = history_matrix(prefixes, model.n_items, config.decay)
    last_idx = np.array([p[-1] for p in prefixes])
    s = config.beta * last_t[last_idx] + (1 - config.beta) * (
        config.gamma * (H @ prob_t) + (1 - config.gamma) * (H @ sim_t)
    )
    return min_max_rows(s)
