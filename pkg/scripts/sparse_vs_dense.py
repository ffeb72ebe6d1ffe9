"""Per-round samples needed by the sparse decoders against the full-rank requirement."""

import argparse
from math import comb

from phaselearn.harness import ExperimentSpec, run_trials


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--s", type=int, default=4)
    ap.add_argument("--grid", default="8,12,16,20,30,40")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20240)
    args = ap.parse_args()

    grid = [int(v) for v in args.grid.split(",")]
    cols = sum(comb(args.n - 1, j) for j in range(args.d))
    print(f"full-rank requirement per round: {cols} columns")
    print(f"{'m':>5} {'joint':>7} {'round':>7}")
    rates = {}
    for decoder in ("joint", "round"):
        spec = ExperimentSpec(
            learner="sparse", n=[args.n], d=args.d, s=args.s, decoder=decoder,
            grid=grid, trials=args.trials, seed=args.seed, timing=False,
        )
        rates[decoder] = [r.success_rate for r in run_trials(spec)]
    for i, m in enumerate(grid):
        print(f"{m:>5} {rates['joint'][i]:>7.2f} {rates['round'][i]:>7.2f}")
    # dense learner at the same budget, for reference
    spec = ExperimentSpec(learner="binary", n=[args.n], d=args.d, grid=grid, trials=args.trials, seed=args.seed, timing=False)
    print("dense learner:", " ".join(f"{r.m}:{r.success_rate:.2f}" for r in run_trials(spec)))


if __name__ == "__main__":
    main()
