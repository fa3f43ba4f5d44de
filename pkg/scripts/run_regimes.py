"""Evaluate every model on both regime presets and print summary tables and paired tests.

    python scripts/run_regimes.py --out runs/regimes
"""

import argparse
import time
from pathlib import Path

from talentrec import reports
from talentrec.benchmark import freeze
from talentrec.config import RunConfig
from talentrec.pipeline import ALL_MODELS, run_repeated_evaluation
from talentrec.synthgen import generate, preset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/regimes")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--presets", default="regime-jobhop,regime-karrierewege")
    args = ap.parse_args()
    cfg = RunConfig.default().updated(jobs=args.jobs)
    for name in args.presets.split(","):
        t0 = time.perf_counter()
        pkg = generate(preset(name), name)
        out = Path(args.out) / name
        digest = freeze(pkg, out / "benchmark")
        res = run_repeated_evaluation(pkg, ALL_MODELS, config=cfg)
        reports.write_metrics(res, out / "metrics.tsv")
        reports.write_summary(res, out / "summary.tsv")
        reports.write_tests(res.tests, out / "tests.tsv")
        reports.write_selection(res, out / "selection.tsv")
        print(f"== {name}  digest {digest[:12]}  ({time.perf_counter() - t0:.1f}s)")
        print(reports.format_summary(res))
        for other, t in res.tests.items():
            print(f"full vs {other:<14} p={t.p_value:.4f} r_rb={t.r_rb:+.3f}")
        lam = [w.as_tuple() for w in res.selected_weights("full")]
        print("selected (lambda_CF, lambda_RL, lambda_T):", lam)
        print()


if __name__ == "__main__":
    main()
