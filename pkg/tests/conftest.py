import numpy as np
import pytest

from talentrec.benchmark import OccupationRecord, UserHistory
from talentrec.synthgen import SynthConfig, banded_kernel, generate


def items_for(ids, titles=None):
    titles = titles or {}
    return [OccupationRecord(o, titles.get(o, f"software developer {o}")) for o in ids]


def histories_from(seqs):
    return [UserHistory(f"u{k:04d}", tuple(s)) for k, s in enumerate(seqs)]


@pytest.fixture(scope="session")
def small_package():
    # 12 items, fast enough for per-test end-to-end runs
    cfg = SynthConfig(n_users=400, n_items=12, p_stay=0.3, family_kernel=banded_kernel(0.4, 0.3), seed=5)
    return generate(cfg, "small")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
