"""Sweeps over (n, m) grids, threshold searches and log-log scaling fits."""

from __future__ import annotations

import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence, TextIO

import numpy as np
from scipy import stats

from phaselearn.harness.config import ConfigError, ExperimentSpec
from phaselearn.harness.trials import TrialResult, run_trial, trial_rng

COLUMNS = (
    "learner",
    "n",
    "d",
    "m",
    "successes",
    "trials",
    "success_rate",
    "mean_samples_used",
    "mean_wall_time",
)


@dataclass(frozen=True)
class Row:
    learner: str
    n: int
    d: int
    m: int
    successes: int
    trials: int
    mean_samples_used: float
    mean_wall_time: float | None

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    def as_list(self) -> list[str]:
        wall = "" if self.mean_wall_time is None else f"{self.mean_wall_time:.6f}"
        return [
            self.learner,
            str(self.n),
            str(self.d),
            str(self.m),
            str(self.successes),
            str(self.trials),
            f"{self.success_rate:.4f}",
            f"{self.mean_samples_used:.2f}",
            wall,
        ]


def _one(args: tuple[ExperimentSpec, int, int, int, int]) -> TrialResult:
    spec, n, m, point, trial = args
    try:
        return run_trial(spec, n, m, trial_rng(spec.seed, point, trial))
    except Exception as exc:  # noqa: BLE001 - a crashing trial counts as a failure
        return TrialResult(False, f"error:{type(exc).__name__}", 0, 0.0)


def grid_points(spec: ExperimentSpec) -> list[tuple[int, int]]:
    return [(n, m) for n in spec.n for m in spec.grid]


def run_point(spec: ExperimentSpec, n: int, m: int, point: int, pool: ProcessPoolExecutor | None = None) -> Row:
    jobs = [(spec, n, m, point, t) for t in range(spec.trials)]
    results = list(pool.map(_one, jobs)) if pool is not None else [_one(j) for j in jobs]
    wall = float(np.mean([r.wall_time for r in results])) if spec.timing else None
    return Row(
        spec.learner,
        n,
        spec.d,
        m,
        sum(r.success for r in results),
        spec.trials,
        float(np.mean([r.samples_used for r in results])),
        wall,
    )


def run_trials(spec: ExperimentSpec) -> list[Row]:
    """One row per (n, m) grid point, each from ``spec.trials`` fresh instances."""
    spec.validate()
    pool = ProcessPoolExecutor(spec.workers) if spec.workers > 1 else None
    try:
        return [run_point(spec, n, m, i, pool) for i, (n, m) in enumerate(grid_points(spec))]
    finally:
        if pool is not None:
            pool.shutdown()


def write_csv(spec: ExperimentSpec, rows: Sequence[Row], out: TextIO) -> None:
    out.write(spec.header())
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.as_list())


def csv_text(spec: ExperimentSpec, rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    write_csv(spec, rows, buf)
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(body))


def find_threshold(
    spec: ExperimentSpec,
    n: int,
    target: float = 0.95,
    lo: int = 1,
    hi: int | None = None,
    point_base: int = 0,
) -> tuple[int, list[Row]]:
    """Smallest m whose success rate reaches ``target`` by bisection.

    Without ``hi`` the bracket grows geometrically from ``lo`` until it passes.
    Every evaluated m gets its own RNG stream keyed by (point_base + m).
    """
    seen: dict[int, Row] = {}

    def rate(m: int) -> float:
        if m not in seen:
            seen[m] = run_point(replace(spec, grid=[m]), n, m, point_base + m)
        return seen[m].success_rate

    if hi is None:
        hi = max(lo, 1)
        while rate(hi) < target:
            lo = hi + 1
            hi = max(hi + 1, math.ceil(hi * 1.25))
            if hi > 1 << 20:
                raise RuntimeError(f"no threshold below 2^20 at n={n}")
    elif rate(hi) < target:
        raise RuntimeError(f"m={hi} does not reach {target} at n={n}")
    while lo < hi:
        mid = (lo + hi) // 2
        if rate(mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return hi, [seen[m] for m in sorted(seen)]


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    ci_low: float
    ci_high: float
    intercept: float
    r_squared: float

    def __str__(self) -> str:
        return f"{self.exponent:.3f} (95% CI {self.ci_low:.3f}..{self.ci_high:.3f}, r^2={self.r_squared:.4f})"


def fit_exponent(points: Sequence[tuple[float, float]], level: float = 0.95) -> ExponentFit:
    """Least-squares slope of log m* against log n, with a t-based confidence interval."""
    pts = [(float(n), float(m)) for n, m in points]
    if len({n for n, _ in pts}) < 3:
        raise ConfigError("need at least three distinct n values to fit an exponent")
    if any(n <= 0 or m <= 0 for n, m in pts):
        raise ConfigError("n and m* must be positive")
    x = np.log([n for n, _ in pts])
    y = np.log([m for _, m in pts])
    res = stats.linregress(x, y)
    t = stats.t.ppf(0.5 + level / 2, len(pts) - 2)
    half = t * res.stderr if math.isfinite(res.stderr) else 0.0
    return ExponentFit(float(res.slope), float(res.slope - half), float(res.slope + half), float(res.intercept), float(res.rvalue**2))


def scaling_study(spec: ExperimentSpec, target: float = 0.95, total: bool = True) -> tuple[ExponentFit, list[tuple[int, int]], list[Row]]:
    """Threshold m* at each n of ``spec.n`` and the fitted exponent.

    With ``total`` the fit uses the total copy count n * m* (one round per
    direction); otherwise the per-round m*.
    """
    thresholds = []
    rows: list[Row] = []
    lo = 1
    for i, n in enumerate(sorted(spec.n)):
        m_star, seen = find_threshold(spec, n, target, lo=lo, point_base=(i + 1) << 24)
        lo = m_star
        thresholds.append((n, m_star))
        rows.extend(seen)
    pts = [(n, n * m if total else m) for n, m in thresholds]
    return fit_exponent(pts), thresholds, rows


def emit(spec: ExperimentSpec, rows: Sequence[Row]) -> None:
    if spec.output in ("-", ""):
        write_csv(spec, rows, sys.stdout)
    else:
        with open(spec.output, "w", newline="") as fh:
            write_csv(spec, rows, fh)
