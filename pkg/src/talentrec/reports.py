"""Delimited report files and the per-user explanation table."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .branch_topsis import CRITERIA, mix_weights, user_weights_batch
from .fusion import FusionWeights, fuse
from .metrics import rank_target
from .pipeline import METRICS, EvaluationResult, SeedContext, SeedResult, SensitivityRow
from .stats import PairedTestResult, paired_test
from .transitions import min_max_normalize

DISPLAY_NAMES = {
    "popularity": "Popularity",
    "repeat_last": "Repeat-last",
    "markov": "Item Markov",
    "transition_cf": "Transition-CF",
    "nmf": "NMF",
    "svd": "SVD",
    "topsis": "TOPSIS",
    "rl": "RL-bandit",
    "cf_topsis": "CF+TOPSIS",
    "rl_topsis": "RL+TOPSIS",
    "full": "CF+RL+TOPSIS",
}


def _write(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _f(x: float) -> str:
    return repr(float(x))


def write_metrics(result: EvaluationResult, path) -> None:
    rows = []
    for m in result.models:
        for s in result.seeds:
            r = result.per_seed[s].metrics[m]
            rows.append([m, s] + [_f(r[k]) for k in METRICS])
    _write(path, ["model", "seed", *METRICS], rows)


def read_metrics(path) -> dict[str, dict[int, dict[str, float]]]:
    out: dict[str, dict[int, dict[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            out.setdefault(row["model"], {})[int(row["seed"])] = {k: float(row[k]) for k in METRICS}
    return out


def pm(mean: float, sd: float) -> str:
    return f"{mean:.4f} ± {sd:.4f}"


def summary_rows(result: EvaluationResult) -> list[list[str]]:
    rows = []
    for m, vals in result.summary().items():
        row = [m]
        for k in METRICS:
            row += [_f(vals[k][0]), _f(vals[k][1]), pm(*vals[k])]
        rows.append(row)
    return rows


def write_summary(result: EvaluationResult, path) -> None:
    header = ["model"]
    for k in METRICS:
        header += [f"{k}_mean", f"{k}_sd", f"{k}_display"]
    _write(path, header, summary_rows(result))


def format_summary(result: EvaluationResult) -> str:
    lines = [f"{'Model':<14} {'HR@5':>17} {'NDCG@5':>17} {'MRR@5':>17}"]
    for m, vals in result.summary().items():
        lines.append(f"{DISPLAY_NAMES.get(m, m):<14} " + " ".join(f"{pm(*vals[k]):>17}" for k in METRICS))
    return "\n".join(lines)


def test_rows(tests: Mapping[str, PairedTestResult], reference: str = "full", metric: str = "ndcg"):
    rows = []
    for other, t in tests.items():
        rows.append(
            [
                f"{reference} vs {other}",
                metric,
                t.n,
                t.n_zero,
                _f(t.p_value),
                f"{t.p_value:.4f}",
                _f(t.r_rb),
                "" if t.d_z is None else _f(t.d_z),
                int(t.zero_mass),
            ]
        )
    return rows


def write_tests(tests: Mapping[str, PairedTestResult], path, reference: str = "full", metric: str = "ndcg") -> None:
    header = ["comparison", "metric", "n", "n_zero", "p_value", "p_display", "r_rb", "d_z", "zero_mass"]
    _write(path, header, test_rows(tests, reference, metric))


def tests_from_metrics(
    metrics: Mapping[str, Mapping[int, Mapping[str, float]]],
    comparisons: Sequence[str],
    reference: str = "full",
    metric: str = "ndcg",
) -> dict[str, PairedTestResult]:
    if reference not in metrics:
        raise KeyError(f"metrics file has no {reference!r} rows")
    seeds = sorted(metrics[reference])
    ref = [metrics[reference][s][metric] for s in seeds]
    out = {}
    for other in comparisons:
        if other == reference or other not in metrics:
            continue
        if sorted(metrics[other]) != seeds:
            raise ValueError(f"{other!r} and {reference!r} cover different seeds")
        out[other] = paired_test(ref, [metrics[other][s][metric] for s in seeds])
    return out


def write_selection(result: EvaluationResult, path) -> None:
    rows = []
    for s in result.seeds:
        sr = result.per_seed[s]
        # alpha is chosen once per seed and shared by every fused mode
        first = next(iter(sr.selections.values()), None)
        if first is not None:
            for a, m in first.alpha_trace:
                rows.append([s, "alpha", "", "", "", a, _f(m), int(a == first.chosen_alpha)])
        for mode, sel in sr.selections.items():
            for w, a, m in sel.grid_trace:
                rows.append([s, mode, w.lambda_cf, w.lambda_rl, w.lambda_t, a, _f(m), int(w == sel.chosen)])
            if not sel.grid_trace:
                w = sel.chosen
                rows.append([s, mode, w.lambda_cf, w.lambda_rl, w.lambda_t, sel.chosen_alpha, _f(sel.validation_metric), 1])
        for kind, d in sr.latent_dims.items():
            rows.append([s, kind, "", "", "", "", "", f"d={d}"])
    _write(path, ["seed", "mode", "lambda_cf", "lambda_rl", "lambda_t", "alpha", "val_ndcg", "chosen"], rows)


def write_sensitivity(base: float, rows: Sequence[SensitivityRow], path) -> None:
    out = [["(none)", _f(base), _f(0.0), f"{base:.4f}"]]
    out += [[r.removed, _f(r.ndcg), _f(r.delta), f"{r.ndcg:.4f} ({r.delta:+.4f})"] for r in rows]
    _write(path, ["removed_proxy", "ndcg", "delta", "display"], out)


def write_timings(timings: Mapping[str, float], path) -> None:
    _write(path, ["phase", "seconds"], [[k, f"{v:.3f}"] for k, v in timings.items()])


# ---------------------------------------------------------------- explanation


@dataclass
class ExplainRow:
    occupation_id: str
    title: str
    cf: float
    rl: float
    topsis: float
    full: float
    is_target: bool


@dataclass
class Explanation:
    user_id: str
    seed: int
    history: list[str]
    target: str
    weights: FusionWeights
    alpha: float
    user_criterion_weights: np.ndarray
    mixed_criterion_weights: np.ndarray
    rows: list[ExplainRow]
    target_ranks: dict[str, int]

    def format(self) -> str:
        out = [
            f"user {self.user_id} (seed {self.seed})",
            "history: " + " -> ".join(self.history),
            f"held-out target: {self.target}",
            f"lambda_CF={self.weights.lambda_cf:.2f} lambda_RL={self.weights.lambda_rl:.2f} "
            f"lambda_T={self.weights.lambda_t:.2f} alpha={self.alpha:.2f}",
            "user-conditioned criterion weights: "
            + ", ".join(f"{n}={w:.2f}" for n, w in zip(CRITERIA, self.user_criterion_weights)),
            "mixed criterion weights: " + ", ".join(f"{n}={w:.2f}" for n, w in zip(CRITERIA, self.mixed_criterion_weights)),
            "",
            f"{'Candidate':<36} {'CF':>6} {'RL':>6} {'TOPSIS':>6} {'Full':>6}",
        ]
        for r in self.rows:
            name = r.title + ("*" if r.is_target else "")
            out.append(f"{name:<36} {r.cf:6.3f} {r.rl:6.3f} {r.topsis:6.3f} {r.full:6.3f}")
        out.append("* held-out target occupation")
        out.append("")
        out.append("target rank: " + ", ".join(f"{DISPLAY_NAMES.get(k, k)}={v}" for k, v in self.target_ranks.items()))
        return "\n".join(out)

    def write_tsv(self, path) -> None:
        rows = [[r.occupation_id, r.title, int(r.is_target), f"{r.cf:.3f}", f"{r.rl:.3f}", f"{r.topsis:.3f}", f"{r.full:.3f}"] for r in self.rows]
        _write(path, ["occupation_id", "candidate", "target", "CF", "RL", "TOPSIS", "Full"], rows)


def explain_user(ctx: SeedContext, result: SeedResult, user_id: str, top: int = 5) -> Explanation:
    """Per-branch scores for one user's test ranking; every column min-max normalized within the user."""
    try:
        u = ctx.data.user_ids.index(user_id)
    except ValueError:
        raise KeyError(f"user {user_id!r} not in split {ctx.seed}") from None
    sel = result.selections["full"]
    alpha = sel.chosen_alpha
    wu = user_weights_batch(ctx.test.H[u : u + 1], ctx.criteria, ctx.w_global)[0]
    mixed = mix_weights(wu, ctx.w_global, alpha)
    s_t = ctx.topsis("test", alpha)[u]
    s_cf, s_rl = ctx.test.cf[u], ctx.test.rl[u]
    full = fuse(s_cf, s_rl, s_t, sel.chosen)
    target = int(ctx.data.test_targets[u])

    full_n = min_max_normalize(full)
    order = sorted(range(len(full)), key=lambda i: (-full[i], i))[:top]
    if target not in order:
        order.append(target)
    rows = [
        ExplainRow(ctx.items[i].occupation_id, ctx.items[i].title, s_cf[i], s_rl[i], s_t[i], full_n[i], i == target)
        for i in order
    ]
    ranks = {"full": rank_target(full, target)}
    ranks["transition_cf"] = rank_target(s_cf, target)
    ranks["rl"] = rank_target(s_rl, target)
    ranks["topsis"] = rank_target(s_t, target)
    for mode in ("cf_topsis", "rl_topsis"):
        if mode in result.selections:
            ranks[mode] = rank_target(fuse(s_cf, s_rl, s_t, result.selections[mode].chosen), target)
    if "markov" in result.ranks:
        ranks["markov"] = int(result.ranks["markov"][u])
    history = [ctx.items[i].title for i in ctx.test.prefixes[u]]
    return Explanation(
        user_id, ctx.seed, history, ctx.items[target].title, sel.chosen, alpha, wu, mixed, rows, ranks
    )
