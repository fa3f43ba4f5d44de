"""Per-split fitting, scoring, and repeated chronological evaluation."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import baselines
from .benchmark import BenchmarkPackage, OccupationRecord
from .branch_cf import history_matrix, score_cf_batch
from .branch_rl import FamilyTaxonomy, score_rl_batch, train_bandit_indexed
from .branch_topsis import (
    CRITERIA,
    CriterionMatrix,
    LexiconConfig,
    build_criterion_matrix,
    deactivate_proxy,
    entropy_weights,
    mix_weights,
    topsis_closeness_batch,
    user_weights_batch,
)
from .config import RunConfig
from .fusion import FusionWeights, SelectionResult, enumerate_lambda_grid, fuse, select_alpha, select_lambdas
from .metrics import mean_metrics, mean_ndcg, rank_targets
from .stats import PairedTestResult, paired_test
from .transitions import TransitionModel, build, min_max_rows

_log = logging.getLogger(__name__)

ALL_MODELS = (
    "popularity",
    "repeat_last",
    "markov",
    "transition_cf",
    "nmf",
    "svd",
    "topsis",
    "rl",
    "cf_topsis",
    "rl_topsis",
    "full",
)
FUSED = {"full": "full", "cf_topsis": "cf_topsis", "rl_topsis": "rl_topsis"}
METRICS = ("hr", "ndcg", "mrr")


class MissingSeedError(KeyError):
    pass


def sorted_items(package: BenchmarkPackage) -> list[OccupationRecord]:
    # index order == ascending id order, which is the ranking tie-break
    return sorted(package.items, key=lambda it: it.occupation_id)


def make_taxonomy(items, config: RunConfig) -> FamilyTaxonomy:
    if config.taxonomy_path:
        return FamilyTaxonomy.from_file(config.taxonomy_path, items)
    return FamilyTaxonomy.from_titles(items)


def make_lexicons(config: RunConfig) -> LexiconConfig:
    return LexiconConfig.from_files(config.digital_terms_path, config.innovation_terms_path, config.role_cues_path)


@dataclass
class SplitData:
    user_ids: list[str]
    train: list[list[int]]
    val_targets: np.ndarray
    test_history: list[list[int]]
    test_targets: np.ndarray


def split_data(package: BenchmarkPackage, seed: int, item_index: Mapping[str, int]) -> SplitData:
    if seed not in package.splits:
        raise MissingSeedError(f"package has no split for seed {seed}")
    seqs = {h.user_id: [item_index[o] for o in h.sequence] for h in package.histories}
    users, train, val, hist, test = [], [], [], [], []
    for spec in package.splits[seed]:
        seq = seqs[spec.user_id]
        t = spec.test_index
        users.append(spec.user_id)
        train.append(seq[: t - 1])
        val.append(seq[t - 1])
        hist.append(seq[:t])
        test.append(seq[t])
    return SplitData(users, train, np.array(val), hist, np.array(test))


@dataclass
class BranchScores:
    cf: np.ndarray
    rl: np.ndarray
    H: np.ndarray  # recency mass per item, used for user-conditioned criterion weights
    prefixes: list[list[int]]


@dataclass
class SeedContext:
    seed: int
    items: list[OccupationRecord]
    data: SplitData
    model: TransitionModel
    criteria: CriterionMatrix
    families: np.ndarray
    Q: np.ndarray
    w_global: np.ndarray
    val: BranchScores
    test: BranchScores
    config: RunConfig

    def topsis(self, which: str, alpha: float) -> np.ndarray:
        bs = self.val if which == "val" else self.test
        Wu = user_weights_batch(bs.H, self.criteria, self.w_global)
        W = mix_weights(Wu, self.w_global[None, :], alpha)
        return min_max_rows(topsis_closeness_batch(self.criteria, W, self.config.topsis_normalization))


def fit_seed(
    package: BenchmarkPackage,
    seed: int,
    config: RunConfig,
    taxonomy: FamilyTaxonomy | None = None,
    lexicons: LexiconConfig | None = None,
    inactive: Iterable[int] = (),
) -> SeedContext:
    """Fit every training-prefix statistic for one split and score validation/test histories."""
    items = sorted_items(package)
    ids = [it.occupation_id for it in items]
    taxonomy = taxonomy or make_taxonomy(items, config)
    lexicons = lexicons or make_lexicons(config)
    index = {o: k for k, o in enumerate(ids)}
    data = split_data(package, seed, index)
    model = build([[ids[k] for k in p] for p in data.train], ids)
    cm = build_criterion_matrix(items, model, lexicons)
    for j in inactive:
        cm = deactivate_proxy(cm, j)
    families = taxonomy.families(ids)
    Q = train_bandit_indexed(data.train, families, config.rl_config(seed))
    cfc, rlc = config.cf_config(), config.rl_config(seed)

    def branch(prefixes):
        return BranchScores(
            cf=score_cf_batch(prefixes, model, cfc),
            rl=score_rl_batch(prefixes, Q, model.popularity, families, rlc),
            H=history_matrix(prefixes, len(ids), config.decay),
            prefixes=prefixes,
        )

    return SeedContext(
        seed, items, data, model, cm, families, Q, entropy_weights(cm), branch(data.train), branch(data.test_history), config
    )


@dataclass
class SeedResult:
    seed: int
    ranks: dict[str, np.ndarray]
    metrics: dict[str, dict[str, float]]
    alpha: float | None = None
    selections: dict[str, SelectionResult] = field(default_factory=dict)
    latent_dims: dict[str, int] = field(default_factory=dict)
    user_ids: list[str] = field(default_factory=list)


def _factor_scores(ctx: SeedContext, kind: str) -> tuple[np.ndarray, int]:
    A = baselines.user_item_matrix(ctx.data.train, len(ctx.items))
    best = None
    for d in ctx.config.latent_dims:
        if d > min(A.shape):
            continue
        if kind == "nmf":
            fm = baselines.fit_nmf(A, d, seed=ctx.seed, iterations=ctx.config.nmf_iterations)
        else:
            fm = baselines.fit_svd(A, d, seed=ctx.seed, iterations=ctx.config.svd_iterations)
        S = fm.scores()
        m = mean_ndcg(S, ctx.data.val_targets)
        if best is None or m > best[0]:
            best = (m, d, S)
    if best is None:
        raise ValueError("no latent dimension fits this benchmark")
    return best[2], best[1]


def evaluate_seed(
    ctx: SeedContext,
    models: Sequence[str] = ALL_MODELS,
    forced_weights: Mapping[str, FusionWeights] | None = None,
) -> SeedResult:
    """Select parameters on validation, then score and rank test targets for every model."""
    unknown = set(models) - set(ALL_MODELS)
    if unknown:
        raise ValueError(f"unknown model(s): {', '.join(sorted(unknown))}")
    forced_weights = forced_weights or {}
    cfg = ctx.config
    val_t, test_t = ctx.data.val_targets, ctx.data.test_targets
    model = ctx.model
    res = SeedResult(ctx.seed, {}, {}, user_ids=ctx.data.user_ids)
    test_scores: dict[str, np.ndarray] = {}

    needs_topsis = any(m in models for m in ("topsis", "cf_topsis", "rl_topsis", "full"))
    if needs_topsis:
        val_topsis = {a: ctx.topsis("val", a) for a in cfg.alpha_grid}
        alpha, alpha_trace = select_alpha(val_topsis, val_t)
        res.alpha = alpha
        t_test = ctx.topsis("test", alpha)
        test_scores["topsis"] = t_test
        for mode in ("full", "cf_topsis", "rl_topsis"):
            if mode not in models:
                continue
            if mode in forced_weights:
                w = forced_weights[mode]
                metric = mean_ndcg(fuse(ctx.val.cf, ctx.val.rl, val_topsis[alpha], w), val_t)
                trace = []
            else:
                grid = enumerate_lambda_grid(mode, cfg.cf_grid, cfg.rl_grid)
                w, metric, trace = select_lambdas(ctx.val.cf, ctx.val.rl, val_topsis[alpha], val_t, grid)
            res.selections[mode] = SelectionResult(w, alpha, metric, [(g, alpha, m) for g, m in trace], alpha_trace)
            test_scores[mode] = fuse(ctx.test.cf, ctx.test.rl, t_test, w)

    hist = ctx.test.prefixes
    if "popularity" in models:
        test_scores["popularity"] = np.tile(baselines.score_popularity(model), (len(hist), 1))
    if "repeat_last" in models:
        test_scores["repeat_last"] = baselines.score_repeat_last_batch(hist, model)
    if "markov" in models:
        test_scores["markov"] = baselines.score_markov_batch(hist, model)
    if "transition_cf" in models:
        test_scores["transition_cf"] = ctx.test.cf
    if "rl" in models:
        test_scores["rl"] = ctx.test.rl
    for kind in ("nmf", "svd"):
        if kind in models:
            test_scores[kind], res.latent_dims[kind] = _factor_scores(ctx, kind)

    for m in models:
        res.ranks[m] = rank_targets(test_scores[m], test_t)
        res.metrics[m] = mean_metrics(res.ranks[m])
    return res


def run_seed(package, seed, config, models=ALL_MODELS, inactive=(), forced_weights=None) -> SeedResult:
    ctx = fit_seed(package, seed, config, inactive=inactive)
    return evaluate_seed(ctx, models, forced_weights)


def _run_seed_star(args):
    return run_seed(*args)


@dataclass
class EvaluationResult:
    models: list[str]
    seeds: list[int]
    per_seed: dict[int, SeedResult]
    timings: dict[str, float] = field(default_factory=dict)
    tests: dict[str, PairedTestResult] = field(default_factory=dict)

    def series(self, model: str, metric: str = "ndcg") -> np.ndarray:
        return np.array([self.per_seed[s].metrics[model][metric] for s in self.seeds])

    def summary(self) -> dict[str, dict[str, tuple[float, float]]]:
        """Mean and population standard deviation across seeds."""
        out = {}
        for m in self.models:
            out[m] = {}
            for k in METRICS:
                x = self.series(m, k)
                out[m][k] = (float(x.mean()), float(x.std()))
        return out

    def selected_weights(self, mode: str = "full") -> list[FusionWeights]:
        return [self.per_seed[s].selections[mode].chosen for s in self.seeds if mode in self.per_seed[s].selections]


def planned_tests(result: EvaluationResult, comparisons: Sequence[str], reference: str = "full", metric: str = "ndcg"):
    out = {}
    if reference not in result.models:
        return out
    for other in comparisons:
        if other in result.models and other != reference:
            out[other] = paired_test(result.series(reference, metric), result.series(other, metric))
    return out


def run_repeated_evaluation(
    package: BenchmarkPackage,
    models: Sequence[str] = ALL_MODELS,
    seeds: Sequence[int] | None = None,
    config: RunConfig | None = None,
    inactive: Iterable[int] = (),
    forced_weights: Mapping[str, FusionWeights] | None = None,
) -> EvaluationResult:
    config = config or RunConfig()
    seeds = list(config.seeds if seeds is None else seeds)
    models = list(models)
    missing = [s for s in seeds if s not in package.splits]
    if missing:
        raise MissingSeedError(f"package has no split for seed(s) {missing}")
    t0 = time.perf_counter()
    inactive = tuple(inactive)
    jobs = [(package, s, config, models, inactive, forced_weights) for s in seeds]
    if config.jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_seed_star, jobs))
    else:
        results = [_run_seed_star(j) for j in jobs]
    result = EvaluationResult(models, seeds, {r.seed: r for r in results})
    result.timings["evaluate_seconds"] = time.perf_counter() - t0
    result.tests = planned_tests(result, config.comparisons)
    return result


@dataclass
class SensitivityRow:
    removed: str
    ndcg: float
    delta: float


def proxy_sensitivity(
    package: BenchmarkPackage, seeds: Sequence[int] | None = None, config: RunConfig | None = None
) -> tuple[float, list[SensitivityRow]]:
    """Leave-one-proxy-out: full-hybrid mean NDCG@5 with each criterion removed in turn."""
    config = config or RunConfig()
    base = run_repeated_evaluation(package, ["full"], seeds, config).series("full").mean()
    rows = []
    for j, name in enumerate(CRITERIA):
        run = run_repeated_evaluation(package, ["full"], seeds, config, inactive=(j,))
        m = run.series("full").mean()
        rows.append(SensitivityRow(name, float(m), float(m - base)))
    return float(base), rows
