"""Success of the Bell-sampling learners as noise and graph degree grow."""

import argparse

from phaselearn.harness import ExperimentSpec, run_trials


def sweep(**kw) -> float:
    return run_trials(ExperimentSpec(timing=False, **kw))[0].success_rate


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=400)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20240)
    args = ap.parse_args()
    common = dict(grid=[args.m], trials=args.trials, seed=args.seed)

    print("global noise, n=14")
    for eps in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5):
        print(f"  eps={eps:.1f}  {sweep(learner='noisy-global', n=[14], eps=eps, **common):.2f}")

    print("local noise, n=12, eps=0.1, by graph degree")
    for gd in range(1, 12):
        print(f"  gd={gd:<2}  {sweep(learner='noisy-local', n=[12], eps=0.1, gd=gd, **common):.2f}")


if __name__ == "__main__":
    main()
