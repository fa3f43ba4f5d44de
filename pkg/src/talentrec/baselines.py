"""Classical comparison scorers sharing the full-universe score-vector contract."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .transitions import TransitionModel, min_max_normalize, min_max_rows

LATENT_DIMS = (6, 10, 14)


def score_popularity(model: TransitionModel) -> np.ndarray:
    return model.popularity.copy()


def score_repeat_last(prefix_idx: Sequence[int], model: TransitionModel) -> np.ndarray:
    s = 0.5 * model.popularity
    s[prefix_idx[-1]] = 1.0
    return s


def score_repeat_last_batch(prefixes: Sequence[Sequence[int]], model: TransitionModel) -> np.ndarray:
    S = np.tile(0.5 * model.popularity, (len(prefixes), 1))
    S[np.arange(len(prefixes)), [p[-1] for p in prefixes]] = 1.0
    return S


def score_markov(prefix_idx: Sequence[int], model: TransitionModel) -> np.ndarray:
    return min_max_normalize(model.last_state_row(prefix_idx[-1]))


def score_markov_batch(prefixes: Sequence[Sequence[int]], model: TransitionModel) -> np.ndarray:
    table = np.where(model.fallback_rows[:, None], model.popularity[None, :], model.probs)
    return min_max_rows(table)[[p[-1] for p in prefixes]]


def user_item_matrix(prefixes: Sequence[Sequence[int]], n_items: int) -> np.ndarray:
    A = np.zeros((len(prefixes), n_items))
    for u, idx in enumerate(prefixes):
        np.add.at(A[u], list(idx), 1.0)
    return A


@dataclass
class FactorModel:
    user_factors: np.ndarray  # |U| x d
    item_factors: np.ndarray  # d x |I|
    latent_dim: int
    kind: str
    objective: list[float] = field(default_factory=list)

    def reconstruct(self) -> np.ndarray:
        return self.user_factors @ self.item_factors

    def scores(self) -> np.ndarray:
        """Min-max normalized reconstruction, one row per training user."""
        return min_max_rows(self.reconstruct())


def fit_nmf(A: np.ndarray, d: int, seed: int = 0, iterations: int = 200, track: bool = False) -> FactorModel:
    """Frobenius NMF by multiplicative updates."""
    A = np.asarray(A, dtype=float)
    _check_dim(A, d)
    rng = np.random.default_rng(seed)
    scale = np.sqrt(max(A.mean(), 1e-12) / d)
    W = rng.uniform(0.1, 1.0, (A.shape[0], d)) * scale
    H = rng.uniform(0.1, 1.0, (d, A.shape[1])) * scale
    eps = 1e-12
    obj = []
    for _ in range(iterations):
        H *= (W.T @ A) / (W.T @ W @ H + eps)
        W *= (A @ H.T) / (W @ (H @ H.T) + eps)
        if track:
            obj.append(float(np.linalg.norm(A - W @ H) ** 2))
    return FactorModel(W, H, d, "nmf", obj)


def fit_svd(A: np.ndarray, d: int, seed: int = 0, iterations: int = 50) -> FactorModel:
    """Truncated SVD by orthogonal (subspace) power iteration on A^T A."""
    A = np.asarray(A, dtype=float)
    _check_dim(A, d)
    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.standard_normal((A.shape[1], d)))
    for _ in range(iterations):
        V, _ = np.linalg.qr(A.T @ (A @ V))
    AV = A @ V
    # rotate to singular directions so components come out ordered
    U, s, Wt = np.linalg.svd(AV, full_matrices=False)
    V = V @ Wt.T
    return FactorModel(U * s, V.T, d, "svd")


def fit_factor_model(A: np.ndarray, d: int, kind: str, seed: int = 0) -> FactorModel:
    if kind == "nmf":
        return fit_nmf(A, d, seed)
    if kind == "svd":
        return fit_svd(A, d, seed)
    raise ValueError(f"unknown factor model kind {kind!r}")


def _check_dim(A, d):
    if not 1 <= d <= min(A.shape):
        raise ValueError(f"latent dimension {d} exceeds min(|U|, |I|) = {min(A.shape)}")
