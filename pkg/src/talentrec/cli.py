"""Command-line entry point: ``talentrec <command> ...``.

Exit codes: 0 success, 1 internal error, 2 input validation.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import reports
from .benchmark import (
    DEFAULT_SEEDS,
    BenchmarkError,
    FilterConfig,
    apply_filters,
    build_package,
    default_filter_config,
    freeze,
    ingest,
    load,
    load_allow_list,
)
from .config import RunConfig, parse_seeds
from .pipeline import ALL_MODELS, MissingSeedError, evaluate_seed, fit_seed, proxy_sensitivity, run_repeated_evaluation
from .synthgen import PRESETS, InfeasibleConfigError, generate, preset

_log = logging.getLogger("talentrec")


class UsageError(Exception):
    """Bad user input; maps to exit code 2."""


def _config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig.default()
    overrides = {"jobs": args.jobs}
    if getattr(args, "seeds", None):
        overrides["seeds"] = parse_seeds(args.seeds)
    for kv in args.set or ():
        if "=" not in kv:
            raise UsageError(f"--set expects key=value, got {kv!r}")
        k, v = kv.split("=", 1)
        overrides[k.strip()] = v
    try:
        return cfg.updated(**overrides)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"bad configuration: {e}") from None


def _models(text: str | None) -> list[str]:
    if not text:
        return list(ALL_MODELS)
    models = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in models if m not in ALL_MODELS]
    if unknown:
        raise UsageError(f"unknown model(s) {', '.join(unknown)}; choose from {', '.join(ALL_MODELS)}")
    return models


def _load(path):
    if not Path(path, "meta.json").exists():
        raise UsageError(f"{path}: not a frozen benchmark directory")
    return load(path)


# ---------------------------------------------------------------- commands


def cmd_prepare(args) -> int:
    for p in (args.histories, args.items):
        if not Path(p).is_file():
            raise UsageError(f"input file not found: {p}")
    cfg = _config(args)
    histories, items = ingest(args.histories, args.items)
    if args.no_allow_list:
        allow = None
    elif args.allow_list or cfg.allow_list_path:
        allow = load_allow_list(args.allow_list or cfg.allow_list_path)
    else:
        allow = default_filter_config().allow_list
    filters = FilterConfig(allow, args.min_length, args.min_support)
    kept_h, kept_i, audit = apply_filters(histories, items, filters)
    for line in audit.lines():
        _log.info(line)
    seeds = parse_seeds(args.seeds) if args.seeds else DEFAULT_SEEDS
    package = build_package(kept_h, kept_i, seeds, source=str(Path(args.histories).resolve().name), filters=filters)
    digest = freeze(package, args.out)
    c = package.metadata["counts"]
    print(f"users={c['users']} occupations={c['occupations']} interactions={c['interactions']}")
    print(digest)
    return 0


def cmd_synth(args) -> int:
    overrides = {}
    if args.users:
        overrides["n_users"] = args.users
    if args.synth_seed is not None:
        overrides["seed"] = args.synth_seed
    try:
        cfg = preset(args.preset, **overrides)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    package = generate(cfg, args.preset)
    print(freeze(package, args.out))
    return 0


def _evaluate(args, models) -> int:
    cfg = _config(args)
    t0 = time.perf_counter()
    package = _load(args.benchmark)
    load_s = time.perf_counter() - t0
    result = run_repeated_evaluation(package, models, config=cfg)
    result.timings = {"load_seconds": load_s, **result.timings}
    out = Path(args.out)
    reports.write_metrics(result, out / "metrics.tsv")
    reports.write_summary(result, out / "summary.tsv")
    reports.write_tests(result.tests, out / "tests.tsv")
    reports.write_selection(result, out / "selection.tsv")
    reports.write_timings(result.timings, out / "timings.tsv")
    if args.dump_stats:
        ctx = fit_seed(package, cfg.canonical_seed if cfg.canonical_seed in package.splits else result.seeds[0], cfg)
        _dump_stats(ctx, out / "stats")
    print(reports.format_summary(result))
    for other, t in result.tests.items():
        print(f"full vs {other}: p={t.p_value:.4f} r_rb={t.r_rb:.3f}")
    for k, v in result.timings.items():
        print(f"{k}: {v:.2f}")
    return 0


def _dump_stats(ctx, directory: Path) -> None:
    import numpy as np

    directory.mkdir(parents=True, exist_ok=True)
    m = ctx.model
    header = "\t".join(m.item_ids)
    for name in ("counts", "probs", "sims"):
        np.savetxt(directory / f"{name}.tsv", getattr(m, name), delimiter="\t", header=header, comments="", fmt="%.10g")
    np.savetxt(directory / "popularity.tsv", m.popularity[None, :], delimiter="\t", header=header, comments="", fmt="%.10g")
    ctx.criteria.dump(directory / "criteria.tsv")


def cmd_evaluate(args) -> int:
    return _evaluate(args, _models(args.models))


def cmd_ablate(args) -> int:
    return _evaluate(args, list(ALL_MODELS))


def cmd_sensitivity(args) -> int:
    cfg = _config(args)
    package = _load(args.benchmark)
    base, rows = proxy_sensitivity(package, config=cfg)
    reports.write_sensitivity(base, rows, Path(args.out) / "sensitivity.tsv")
    print(f"{'(none)':<12} {base:.4f}")
    for r in rows:
        print(f"{r.removed:<12} {r.ndcg:.4f} ({r.delta:+.4f})")
    return 0


def cmd_explain(args) -> int:
    cfg = _config(args)
    package = _load(args.benchmark)
    seed = args.seed if args.seed is not None else cfg.canonical_seed
    ctx = fit_seed(package, seed, cfg)
    result = evaluate_seed(ctx, ["markov", "cf_topsis", "rl_topsis", "full"])
    try:
        exp = reports.explain_user(ctx, result, args.user)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    print(exp.format())
    if args.out:
        exp.write_tsv(args.out)
    return 0


def cmd_stats(args) -> int:
    cfg = _config(args)
    if not Path(args.metrics).is_file():
        raise UsageError(f"metrics file not found: {args.metrics}")
    metrics = reports.read_metrics(args.metrics)
    try:
        tests = reports.tests_from_metrics(metrics, cfg.comparisons, args.reference, args.metric)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from None
    if args.out:
        reports.write_tests(tests, args.out, args.reference, args.metric)
    for other, t in tests.items():
        dz = "n/a" if t.d_z is None else f"{t.d_z:.3f}"
        print(f"{args.reference} vs {other}: p={t.p_value!r} ({t.p_value:.4f}) r_rb={t.r_rb:.3f} d_z={dz}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file (default: $TALENTREC_CONFIG)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for per-seed evaluation")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="talentrec", description="Late-fusion next-occupation recommender benchmark tools.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("prepare", parents=[common], help="ingest, filter, split, and freeze a benchmark")
    s.add_argument("--histories", required=True)
    s.add_argument("--items", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--allow-list", help="allow-list file (default: shipped ICT list)")
    s.add_argument("--no-allow-list", action="store_true", help="keep every occupation")
    s.add_argument("--min-support", type=int, default=25)
    s.add_argument("--min-length", type=int, default=3)
    s.add_argument("--seeds", help="split seeds, e.g. 20260331,100..109")
    s.set_defaults(func=cmd_prepare)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic benchmark from a preset")
    s.add_argument("preset", choices=sorted(PRESETS))
    s.add_argument("--out", required=True)
    s.add_argument("--users", type=int)
    s.add_argument("--synth-seed", type=int)
    s.set_defaults(func=cmd_synth)

    for name, func, helptext in (
        ("evaluate", cmd_evaluate, "evaluate selected models over repeated splits"),
        ("ablate", cmd_ablate, "evaluate the full model suite"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("benchmark")
        s.add_argument("--out", required=True)
        s.add_argument("--seeds")
        if name == "evaluate":
            s.add_argument("--models", help=f"comma list from {','.join(ALL_MODELS)}")
        s.add_argument("--dump-stats", action="store_true", help="write transition and criterion tables")
        s.set_defaults(func=func)

    s = sub.add_parser("sensitivity", parents=[common], help="leave-one-proxy-out analysis")
    s.add_argument("benchmark")
    s.add_argument("--out", required=True)
    s.add_argument("--seeds")
    s.set_defaults(func=cmd_sensitivity)

    s = sub.add_parser("explain", parents=[common], help="per-user branch score report")
    s.add_argument("benchmark")
    s.add_argument("--user", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="also write the candidate table here")
    s.set_defaults(func=cmd_explain)

    s = sub.add_parser("stats", parents=[common], help="recompute paired tests from a metrics file")
    s.add_argument("metrics")
    s.add_argument("--reference", default="full")
    s.add_argument("--metric", default="ndcg", choices=reports.METRICS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, BenchmarkError, MissingSeedError, InfeasibleConfigError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        _log.debug("internal error", exc_info=True)
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
