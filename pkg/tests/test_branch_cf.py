import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from talentrec.baselines import score_markov_batch
from talentrec.branch_cf import CFConfig, history_matrix, recency_weights, score_cf, score_cf_batch
from talentrec.transitions import build

IDS = ["A", "B", "C"]


def test_recency_weights():
    assert recency_weights(1, 0.8).tolist() == [1.0]
    np.testing.assert_allclose(recency_weights(3, 0.5), [1 / 7, 2 / 7, 4 / 7], rtol=0, atol=1e-15)
    np.testing.assert_allclose(recency_weights(6, 1.0), np.full(6, 1 / 6), rtol=0, atol=1e-15)


def test_one_hot_row_points_to_b():
    m = build([["A", "B"], ["A", "B"], ["C", "A"]], IDS)
    s = score_cf(["A"], m)
    assert int(np.argmax(s)) == 1


def _mm(v):
    v = np.asarray(v, float)
    return (v - v.min()) / (v.max() - v.min()) if v.max() > v.min() else np.zeros_like(v)


def test_matches_scalar_evaluation():
    # hand oracle: every quantity computed element by element
    prefixes = [["A", "B", "C"], ["B", "A"], ["C", "C", "A"], ["A", "C"]]
    m = build(prefixes, IDS)
    cfg = CFConfig(beta=0.6, gamma=0.3, decay=0.5)
    hist = ["A", "B"]
    rho = [1 / 3, 2 / 3]
    last = _mm(m.probs[1])
    trans = [sum(rho[t] * _mm(m.probs[IDS.index(h)])[i] for t, h in enumerate(hist)) for i in range(3)]
    sim = [sum(rho[t] * _mm(m.sims[IDS.index(h)])[i] for t, h in enumerate(hist)) for i in range(3)]
    raw = [0.6 * last[i] + 0.4 * (0.3 * trans[i] + 0.7 * sim[i]) for i in range(3)]
    np.testing.assert_allclose(score_cf(hist, m, cfg), _mm(raw), rtol=0, atol=1e-12)


def test_beta_one_is_markov_row():
    m = build([["A", "B", "C"], ["A", "C", "C"], ["B", "B"]], IDS)
    s = score_cf(["C", "A"], m, CFConfig(beta=1.0))
    assert np.array_equal(s, _mm(m.probs[0]))


def test_empty_prefix():
    m = build([["A", "B"]], IDS)
    with pytest.raises(ValueError):
        score_cf([], m)


def test_history_matrix():
    H = history_matrix([[0, 1, 0]], 3, 0.5)
    np.testing.assert_allclose(H, [[1 / 7 + 4 / 7, 2 / 7, 0]])


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(st.integers(0, 4), min_size=2, max_size=6), min_size=3, max_size=15),
    st.floats(0, 1),
    st.floats(0, 1),
    st.floats(0.1, 1),
)
def test_batch_equals_single(prefixes, beta, gamma, decay):
    ids = ["a", "b", "c", "d", "e"]
    m = build([[ids[i] for i in p] for p in prefixes], ids)
    cfg = CFConfig(beta, gamma, decay)
    S = score_cf_batch(prefixes, m, cfg)
    for p, row in zip(prefixes, S):
        np.testing.assert_allclose(row, score_cf([ids[i] for i in p], m, cfg), rtol=0, atol=1e-12)
    assert S.min() >= 0 and S.max() <= 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 4), min_size=1, max_size=6), min_size=3, max_size=15))
def test_beta_one_batch_equals_markov_exactly(prefixes):
    ids = ["a", "b", "c", "d", "e"]
    m = build([[ids[i] for i in p] for p in prefixes], ids)
    S = score_cf_batch(prefixes, m, CFConfig(beta=1.0))
    assert np.array_equal(S, score_markov_batch(prefixes, m))
