import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from talentrec.baselines import (
    fit_factor_model,
    fit_nmf,
    fit_svd,
    score_markov,
    score_popularity,
    score_repeat_last,
    user_item_matrix,
)
from talentrec.metrics import rank_target
from talentrec.transitions import build

IDS = ["A", "B", "C", "D", "E"]


@pytest.fixture
def model():
    # occurrences A=4, B=3, C=2, D=2, E=0; E is cold
    return build([["A", "B", "A"], ["B", "C", "A"], ["D", "A", "B"], ["C", "D"]], IDS)


def _ranking(s):
    return sorted(range(len(s)), key=lambda i: (-s[i], i))


def test_popularity(model):
    s = score_popularity(model)
    assert s[0] == 1.0 and s[4] == 0.0
    assert _ranking(s) == [0, 1, 2, 3, 4]  # C and D tie; id order breaks it


def test_repeat_last(model):
    s = score_repeat_last([2, 3], model)
    order = _ranking(s)
    assert order[0] == 3
    assert order[1:5] == [0, 1, 2, 4]


def test_markov_chain(model):
    s = score_markov([2], model)  # C -> A, C -> D
    assert s[0] == s[3] == 1.0
    assert rank_target(s, 0) == 1
    ab = build([["A", "B"]] * 3, IDS)
    assert rank_target(score_markov([0], ab), 1) == 1


def test_markov_cold_is_popularity(model):
    s = score_markov([4], model)
    assert np.array_equal(s, model.popularity)


def test_markov_hand_row(model):
    # B -> A (1), B -> C (1) out of 2
    np.testing.assert_allclose(score_markov([1], model), [1, 0, 1, 0, 0], rtol=0, atol=0)


def test_nmf_rank_one(rng):
    A = np.outer(rng.uniform(0.5, 2, 30), rng.uniform(0.5, 2, 12))
    fm = fit_nmf(A, 1, seed=0, iterations=500)
    assert np.linalg.norm(A - fm.reconstruct()) / np.linalg.norm(A) < 1e-6


def test_nmf_monotone(rng):
    A = rng.poisson(1.0, (40, 15)).astype(float)
    fm = fit_nmf(A, 4, seed=3, iterations=150, track=True)
    obj = np.array(fm.objective)
    assert np.all(np.diff(obj) <= 1e-9 * obj[:-1])
    assert np.all(fm.user_factors >= 0) and np.all(fm.item_factors >= 0)


def test_svd_full_rank(rng):
    A = rng.normal(size=(20, 8))
    fm = fit_svd(A, 8, seed=1)
    assert np.linalg.norm(A - fm.reconstruct()) / np.linalg.norm(A) < 1e-8


def test_svd_matches_numpy(rng):
    A = rng.poisson(2.0, (60, 12)).astype(float)
    fm = fit_svd(A, 4, seed=2, iterations=200)
    U, s, Vt = np.linalg.svd(A)
    best = (U[:, :4] * s[:4]) @ Vt[:4]
    np.testing.assert_allclose(fm.reconstruct(), best, atol=1e-8)


def test_dim_too_large():
    with pytest.raises(ValueError):
        fit_factor_model(np.ones((3, 5)), 4, "svd")
    with pytest.raises(ValueError):
        fit_factor_model(np.ones((3, 5)), 2, "pca")


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(0, 4), min_size=1, max_size=5), min_size=5, max_size=12))
def test_factor_scores_in_unit_range(prefixes):
    A = user_item_matrix(prefixes, 5)
    assert A.sum() == sum(len(p) for p in prefixes)
    for kind in ("nmf", "svd"):
        S = fit_factor_model(A, 2, kind).scores()
        assert S.shape == A.shape
        assert np.all((S >= 0) & (S <= 1))
