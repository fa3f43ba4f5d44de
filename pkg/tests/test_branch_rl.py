import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from talentrec.benchmark import OccupationRecord
from talentrec.branch_cf import score_cf
from talentrec.branch_rl import (
    FamilyTaxonomy,
    RLConfig,
    _train,
    bandit_update,
    family_bias,
    family_from_title,
    score_rl,
    score_rl_batch,
    train_bandit,
)
from talentrec.fusion import FusionWeights, fuse
from talentrec.metrics import rank_target
from talentrec.resources import FAMILY_NAMES, FAMILY_TITLES
from talentrec.transitions import build


def test_single_update():
    assert bandit_update(0.0, 1.0, 0.2) == pytest.approx(0.2)


def test_geometric_closed_form():
    # only 0 -> 1 pairs and no negatives: Q(0,1) = 1 - 0.8**(passes * N)
    n = 7
    q = _train([0] * n, [1] * n, RLConfig(negatives_per_positive=0, passes=30), normalize=False)
    assert q[0, 1] == pytest.approx(1 - 0.8 ** (30 * n), abs=1e-12)
    assert np.count_nonzero(q) == 1


@settings(max_examples=100)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 1.0), st.integers(0, 60))
def test_fixed_point_recursion(q0, r, eta, k):
    q = q0
    for _ in range(k):
        q = bandit_update(q, r, eta)
    assert abs(abs(q - r) - abs(q0 - r) * (1 - eta) ** k) <= 1e-12


def test_argmax_robust_over_seeds():
    tax = FamilyTaxonomy({"A": 0, "B": 1})
    for seed in range(100):
        Q = train_bandit([["A", "B"]] * 5, tax, RLConfig(seed=seed))
        assert int(np.argmax(Q[0])) == 1


def test_training_deterministic():
    tax = FamilyTaxonomy({"A": 0, "B": 1, "C": 3})
    corpus = [["A", "B", "C"], ["C", "A"], ["B", "B", "A"]]
    a = train_bandit(corpus, tax, RLConfig(seed=4))
    b = train_bandit(corpus, tax, RLConfig(seed=4))
    assert np.array_equal(a, b)
    assert a.min() >= 0 and a.max() <= 1


def test_empty_corpus():
    with pytest.raises(ValueError):
        train_bandit([["A"]], FamilyTaxonomy({"A": 0}))


def test_config_validation():
    with pytest.raises(ValueError):
        RLConfig(eta=0)
    with pytest.raises(ValueError):
        RLConfig(mix_family=0.7, mix_pop=0.2)


def test_family_bias_examples():
    assert family_bias([2, 2, 2]).tolist() == [0, 0, 1, 0, 0, 0]
    np.testing.assert_allclose(family_bias([0, 1], decay=0.5), [0.5, 1, 0, 0, 0, 0], rtol=0, atol=1e-15)
    assert family_bias([4]).tolist() == [0, 0, 0, 0, 1, 0]
    with pytest.raises(ValueError):
        family_bias([])


def test_score_arithmetic():
    # item 0 sits in the preferred family, item 1 nowhere useful
    tax = FamilyTaxonomy({"x": 0, "y": 1, "z": 1})
    Q = np.zeros((6, 6))
    Q[0, 0] = 1.0
    cfg = RLConfig(omega=1.0)
    s = score_rl(["x"], Q, np.array([0.5, 0.0, 1.0]), ["x", "y", "z"], tax, cfg)
    # raw: 0.875, 0.0, 0.25
    np.testing.assert_allclose(s, [1.0, 0.0, 0.25 / 0.875], rtol=0, atol=1e-15)


def test_preferred_family_outranks_when_popularity_constant():
    ids = [f"i{k}" for k in range(12)]
    tax = FamilyTaxonomy({o: k % 6 for k, o in enumerate(ids)})
    Q = np.eye(6)[[3, 3, 3, 3, 3, 3]]
    s = score_rl(["i0"], Q, np.full(12, 0.4), ids, tax, RLConfig(omega=1.0))
    top = {k for k in range(12) if k % 6 == 3}
    assert min(s[k] for k in top) > max(s[k] for k in range(12) if k not in top)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(0, 7), min_size=1, max_size=5), min_size=1, max_size=8), st.integers(0, 50))
def test_batch_equals_single(prefixes, seed):
    ids = [f"o{k}" for k in range(8)]
    fam = np.array([0, 1, 2, 3, 4, 5, 0, 3])
    tax = FamilyTaxonomy(dict(zip(ids, fam.tolist())))
    rng = np.random.default_rng(seed)
    Q, pop = rng.uniform(size=(6, 6)), rng.uniform(size=8)
    S = score_rl_batch(prefixes, Q, pop, fam)
    for p, row in zip(prefixes, S):
        single = score_rl([ids[i] for i in p], Q, pop, ids, tax)
        np.testing.assert_allclose(row, single, rtol=0, atol=1e-12)
    # items enter only through (family, popularity): o0/o6 share family 0
    pop[6] = pop[0]
    S = score_rl_batch(prefixes, Q, pop, fam)
    assert np.array_equal(S[:, 0], S[:, 6])


def test_default_titles_map_to_their_family():
    for f, titles in FAMILY_TITLES.items():
        for t in titles:
            assert family_from_title(t) == f, t
    assert family_from_title("florist") == 0


def test_taxonomy_file(tmp_path):
    p = tmp_path / "tax.tsv"
    p.write_text("A\tdata and AI\nB\tTechnology Management\n")
    items = [OccupationRecord("A", "x"), OccupationRecord("B", "y"), OccupationRecord("C", "network engineer")]
    tax = FamilyTaxonomy.from_file(p, items)
    assert tax.families(["A", "B", "C"]).tolist() == [2, 5, 1]
    p.write_text("A\tbakery\n")
    with pytest.raises(ValueError, match="unknown family"):
        FamilyTaxonomy.from_file(p)
    assert len(FAMILY_NAMES) == 6


def test_same_family_rescue():
    """A same-family target that CF ranks low is lifted by the RL branch into the fused top 3."""
    web, sw, ui, desk, app = "web", "sw", "ui", "desk", "app"
    ids = [app, desk, sw, ui, web]
    fam = {web: 3, ui: 3, sw: 0, app: 0, desk: 1}
    corpus = [[sw, sw, ui]] * 10 + [[desk, app, sw]] * 20 + [[web, sw, sw]] * 20 + [[web, web, web]] * 40
    model = build(corpus, ids)
    tax = FamilyTaxonomy(fam)
    Q = train_bandit(corpus, tax, RLConfig(seed=1))
    history = [desk, web, web, app, web]
    s_cf = score_cf(history, model)
    s_rl = score_rl(history, Q, model.popularity, ids, tax)
    s_t = np.array([0.302, 1.0, 0.723, 0.07, 0.44])
    target = ids.index(ui)
    assert rank_target(s_cf, target) >= 4
    assert rank_target(s_rl, target) == 2
    full = fuse(s_cf, s_rl, s_t, FusionWeights(0.5, 0.4, 0.1))
    assert rank_target(full, target) <= 3
