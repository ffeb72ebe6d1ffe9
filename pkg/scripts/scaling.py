"""Threshold m* per n and the log-log exponent for the binary learner.

    python scripts/scaling.py --d 2 --n 8,16,24,32,40
    python scripts/scaling.py --d 3 --n 10,13,16,19 --csv d3.csv
"""

import argparse
import sys

from phaselearn.harness import ExperimentSpec
from phaselearn.harness.runner import scaling_study, write_csv


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--n", default="8,16,24,32,40")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20240)
    ap.add_argument("--target", type=float, default=0.95)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--csv", help="write every evaluated (n, m) point here")
    args = ap.parse_args()

    spec = ExperimentSpec(
        learner="binary", n=[int(v) for v in args.n.split(",")], d=args.d, trials=args.trials,
        seed=args.seed, workers=args.workers, timing=False,
    )
    fit, thresholds, rows = scaling_study(spec, args.target)
    print(f"{'n':>4} {'m*':>6} {'n*m*':>8}")
    for n, m in thresholds:
        print(f"{n:>4} {m:>6} {n * m:>8}")
    print(f"exponent of total copies vs n: {fit}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(spec, rows, fh)
    return 0


if __name__ == "__main__":
    sys.exit(main())
