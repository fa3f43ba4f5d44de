"""Leave-one-proxy-out sensitivity on a synthetic preset.

    python scripts/run_sensitivity.py --preset regime-prevalence
"""

import argparse
from pathlib import Path

from talentrec import reports
from talentrec.config import RunConfig
from talentrec.pipeline import proxy_sensitivity
from talentrec.synthgen import generate, preset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="regime-prevalence")
    ap.add_argument("--out", default="runs/sensitivity")
    args = ap.parse_args()
    pkg = generate(preset(args.preset), args.preset)
    base, rows = proxy_sensitivity(pkg, config=RunConfig.default())
    reports.write_sensitivity(base, rows, Path(args.out) / f"{args.preset}.tsv")
    print(f"{'removed proxy':<24} NDCG@5")
    print(f"{'(none)':<24} {base:.4f}")
    for r in rows:
        print(f"{r.removed:<24} {r.ndcg:.4f} ({r.delta:+.4f})")


if __name__ == "__main__":
    main()
