import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from talentrec.fusion import (
    CF_GRID,
    RL_GRID,
    FusionWeights,
    enumerate_lambda_grid,
    fuse,
    select,
    select_alpha,
    select_lambdas,
)


def test_endpoints():
    a, b, c = np.array([1.0, 0.2]), np.array([0.0, 1.0]), np.array([0.3, 0.7])
    assert np.array_equal(fuse(a, b, c, FusionWeights(1, 0, 0)), a)
    assert np.array_equal(fuse(a, b, c, FusionWeights(0, 0, 1)), c)


def test_arithmetic():
    out = fuse([1, 0], [0, 1], [0.5, 0.5], FusionWeights(0.5, 0.4, 0.1))
    np.testing.assert_allclose(out, [0.55, 0.45], rtol=0, atol=1e-15)


def test_weight_validation():
    with pytest.raises(ValueError):
        FusionWeights(0.5, 0.6, -0.1)
    with pytest.raises(ValueError):
        FusionWeights(0.5, 0.4, 0.2)
    with pytest.raises(ValueError):
        fuse([1, 0], [1], [0, 1], FusionWeights(1, 0, 0))


def test_grid_sizes():
    raw = [(a, b) for a in CF_GRID for b in RL_GRID]
    assert len(raw) == 48
    assert len([p for p in raw if p[0] + p[1] <= 1 + 1e-12]) == 45
    assert len(enumerate_lambda_grid("full")) == 45
    assert len(enumerate_lambda_grid("cf_topsis")) == 8
    assert len(enumerate_lambda_grid("rl_topsis")) == 6
    for mode in ("full", "cf_topsis", "rl_topsis"):
        for w in enumerate_lambda_grid(mode):
            assert min(w.as_tuple()) >= 0 and abs(sum(w.as_tuple()) - 1) <= 1e-12
    with pytest.raises(ValueError):
        enumerate_lambda_grid("everything")


@given(st.integers(2, 8), st.integers(0, 2**31))
def test_chosen_maximizes(n_users, seed):
    r = np.random.default_rng(seed)
    s = [r.uniform(size=(n_users, 9)) for _ in range(3)]
    t = r.integers(0, 9, n_users)
    w, m, trace = select_lambdas(*s, t, enumerate_lambda_grid())
    assert m == max(x for _, x in trace)


def test_cf_perfect_picks_max_cf():
    r = np.random.default_rng(0)
    t = r.integers(0, 10, 50)
    s_cf = np.zeros((50, 10))
    s_cf[np.arange(50), t] = 1.0
    s_rl, s_t = r.uniform(size=(50, 10)), r.uniform(size=(50, 10))
    w, m, _ = select_lambdas(s_cf, s_rl, s_t, t, enumerate_lambda_grid())
    assert w.lambda_cf == 0.7 and m == 1.0


def test_tie_break_larger_cf():
    # all-constant scores: every grid point ties
    S = np.ones((4, 5))
    w, _, _ = select_lambdas(S, S, S, np.zeros(4, dtype=int), enumerate_lambda_grid())
    assert w == FusionWeights(0.7, 0.0, 0.3)


def test_alpha_tie_goes_small():
    S = np.ones((3, 4))
    a, trace = select_alpha({0.0: S, 0.5: S, 1.0: S}, np.zeros(3, dtype=int))
    assert a == 0.0 and len(trace) == 3


def test_two_stage_select():
    r = np.random.default_rng(3)
    t = r.integers(0, 6, 20)
    good = np.zeros((20, 6))
    good[np.arange(20), t] = 1
    by_alpha = {0.0: r.uniform(size=(20, 6)), 0.75: good}
    res = select(r.uniform(size=(20, 6)), r.uniform(size=(20, 6)), by_alpha, t)
    assert res.chosen_alpha == 0.75
    assert res.validation_metric == max(m for _, _, m in res.grid_trace)
    with pytest.raises(ValueError):
        select(good, good, by_alpha, [])
