"""Print the per-branch explanation for the first users whose target the full hybrid recovers
in its top 3 while transition-CF ranks it outside its top 5.

    python scripts/explain_example.py --preset regime-jobhop --count 2
"""

import argparse

from talentrec import reports
from talentrec.config import RunConfig
from talentrec.pipeline import evaluate_seed, fit_seed
from talentrec.synthgen import generate, preset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="regime-jobhop")
    ap.add_argument("--count", type=int, default=2)
    args = ap.parse_args()
    cfg = RunConfig.default()
    pkg = generate(preset(args.preset), args.preset)
    ctx = fit_seed(pkg, cfg.canonical_seed, cfg)
    res = evaluate_seed(ctx, ["markov", "transition_cf", "cf_topsis", "rl_topsis", "full"])
    shown = 0
    for u, uid in enumerate(ctx.data.user_ids):
        if res.ranks["full"][u] <= 3 and res.ranks["transition_cf"][u] > 5:
            print(reports.explain_user(ctx, res, uid).format())
            print()
            shown += 1
            if shown == args.count:
                break
    if not shown:
        print("no rescued user found on this split")


if __name__ == "__main__":
    main()
