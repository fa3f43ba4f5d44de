"""Training-prefix statistics shared by the branches and baselines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


def min_max_normalize(v) -> np.ndarray:
    """(v - min) / (max - min); a constant vector maps to all zeros."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return v.copy()
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def min_max_rows(m: np.ndarray) -> np.ndarray:
    """Row-wise ``min_max_normalize`` of a 2-D array."""
    m = np.asarray(m, dtype=float)
    lo = m.min(axis=1, keepdims=True)
    span = m.max(axis=1, keepdims=True) - lo
    out = np.zeros_like(m)
    ok = span[:, 0] > 0
    out[ok] = (m[ok] - lo[ok]) / span[ok]
    return out


@dataclass(frozen=True)
class TransitionModel:
    item_ids: tuple[str, ...]
    item_index: Mapping[str, int]
    counts: np.ndarray
    probs: np.ndarray
    sims: np.ndarray
    popularity: np.ndarray
    occurrences: np.ndarray
    fallback_rows: np.ndarray  # bool, True where probs row is the uniform fallback

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    def index(self, occupation_ids: Sequence[str]) -> list[int]:
        try:
            return [self.item_index[o] for o in occupation_ids]
        except KeyError as e:
            raise KeyError(f"unknown occupation id {e.args[0]!r}") from None

    def last_state_row(self, j: int) -> np.ndarray:
        """Outgoing transition probabilities of ``j``, backing off to popularity for cold rows."""
        if self.fallback_rows[j]:
            return self.popularity
        return self.probs[j]


def build(train_prefixes: Sequence[Sequence[str]], item_ids: Sequence[str]) -> TransitionModel:
    """Count adjacent pairs (self-transitions included) over the training prefixes."""
    item_ids = tuple(item_ids)
    index = {o: k for k, o in enumerate(item_ids)}
    n = len(item_ids)
    counts = np.zeros((n, n), dtype=np.int64)
    occ = np.zeros(n, dtype=np.int64)
    total = 0
    for prefix in train_prefixes:
        idx = [index[o] for o in prefix]
        total += len(idx)
        np.add.at(occ, idx, 1)
        if len(idx) > 1:
            np.add.at(counts, (idx[:-1], idx[1:]), 1)
    if total == 0:
        raise ValueError("empty training corpus")

    row_sum = counts.sum(axis=1)
    fallback = row_sum == 0
    probs = np.full((n, n), 1.0 / n)
    probs[~fallback] = counts[~fallback] / row_sum[~fallback, None]

    c = counts.astype(float)
    norms = np.sqrt((c * c).sum(axis=1))
    safe = np.where(norms > 0, norms, 1.0)
    unit = c / safe[:, None]
    sims = unit @ unit.T
    sims[fallback, :] = 0.0
    sims[:, fallback] = 0.0
    # exact ones on the diagonal of active rows; clip float noise
    np.clip(sims, 0.0, 1.0, out=sims)
    sims[np.flatnonzero(~fallback), np.flatnonzero(~fallback)] = 1.0

    return TransitionModel(
        item_ids=item_ids,
        item_index=index,
        counts=counts,
        probs=probs,
        sims=sims,
        popularity=min_max_normalize(occ),
        occurrences=occ,
        fallback_rows=fallback,
    )
