"""Exact paired statistics for a handful of repeated splits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

MAX_EXACT_N = 25


@dataclass(frozen=True)
class PairedTestResult:
    p_value: float
    r_rb: float
    d_z: float | None
    n: int
    n_zero: int
    zero_mass: bool = False


def _signed_ranks(differences):
    d = np.asarray(differences, dtype=float)
    nz = d[d != 0]
    ranks = rankdata(np.abs(nz))  # average ranks for ties
    return nz, ranks, int((d == 0).sum())


def wilcoxon_exact(differences) -> float:
    """Two-sided exact signed-rank p-value.

    Counts, over all 2**n sign assignments of the observed absolute ranks, those
    whose min(W+, W-) is at most the observed one. Mid-ranks are multiples of
    1/2, so the count is done on doubled integer ranks.
    """
    nz, ranks, _ = _signed_ranks(differences)
    n = len(nz)
    if n == 0:
        return 1.0
    if n > MAX_EXACT_N:
        raise ValueError(f"exact enumeration limited to n <= {MAX_EXACT_N}, got {n}")
    r2 = np.rint(2 * ranks).astype(int)
    total = int(r2.sum())
    w_plus = int(r2[nz > 0].sum())
    observed = min(w_plus, total - w_plus)
    # counts[s] = number of sign assignments with doubled W+ == s
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in r2:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    extreme = sum(c for s, c in enumerate(counts) if min(s, total - s) <= observed)
    return extreme / 2**n


def rank_biserial(differences) -> float:
    """(W+ - W-) / (W+ + W-) over non-zero differences."""
    nz, ranks, _ = _signed_ranks(differences)
    if len(nz) == 0:
        raise ValueError("rank-biserial undefined: all differences are zero")
    w_plus = ranks[nz > 0].sum()
    w_minus = ranks[nz < 0].sum()
    return float((w_plus - w_minus) / (w_plus + w_minus))


def cohens_dz(differences) -> float:
    """Mean difference over its population standard deviation."""
    d = np.asarray(differences, dtype=float)
    if d.size < 2:
        raise ValueError("d_z needs at least two differences")
    sd = d.std()
    if sd == 0:
        raise ValueError("d_z undefined: differences have zero spread")
    return float(d.mean() / sd)


def paired_test(a, b) -> PairedTestResult:
    """Compare per-split metrics ``a`` (e.g. full hybrid) against ``b``."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    nz, _, n_zero = _signed_ranks(d)
    p = wilcoxon_exact(d)
    zero_mass = len(nz) == 0
    r = 0.0 if zero_mass else rank_biserial(d)
    try:
        dz = cohens_dz(d)
    except ValueError:
        dz = None
    return PairedTestResult(p, r, dz, len(d), n_zero, zero_mass)
