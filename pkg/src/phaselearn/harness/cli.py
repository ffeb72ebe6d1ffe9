"""Command-line entry point: learn, sweep, verify, reconstruct, selftest."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Callable

import numpy as np

from phaselearn.harness.config import LEARNERS, ConfigError, load_spec

SEED_ENV = "PHASELEARN_SEED"


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None


# -- check tables -------------------------------------------------------------


class CheckTable:
    def __init__(self, out=None) -> None:
        self.rows: list[tuple[str, bool, str]] = []
        self.out = out or sys.stdout

    def add(self, name: str, passed: bool, detail: str) -> None:
        self.rows.append((name, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'}  {name:<44} {detail}", file=self.out, flush=True)

    def run(self, name: str, fn: Callable[[], tuple[bool, str]]) -> None:
        try:
            passed, detail = fn()
        except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        self.add(name, passed, detail)

    @property
    def ok(self) -> bool:
        return all(p for _, p, _ in self.rows)

    def summary(self) -> int:
        bad = sum(not p for _, p, _ in self.rows)
        print(f"{len(self.rows) - bad}/{len(self.rows)} checks passed", file=self.out)
        return 0 if self.ok else 1


def verify_checks(table: CheckTable, quick: bool = False) -> None:
    from phaselearn import pgm

    def prop1():
        r = pgm.second_moment_average(3 if quick else 4, 2)
        return r.max_diff < 1e-12, f"max |diff| = {r.max_diff:.2e} over {r.samples} polynomials"

    def uniformity(M):
        def check():
            res = pgm.pgm_measurement(pgm.Ensemble.from_polys(pgm.all_polys(3, 2, constant=True), M))
            spread = float(res.probabilities.max() - res.probabilities.min())
            ok = spread < 1e-9 and res.completeness_error < 1e-9
            return ok, f"spread {spread:.2e}, completeness {res.completeness_error:.2e}"
        return check

    def ghz():
        worst = max(
            abs(pgm.ghz_noise_distance(n, e) - 2 * (1 - e) ** n)
            for n in range(1, 7)
            for e in np.round(np.linspace(0, 1, 11), 10)
        )
        return worst < 1e-10, f"max error {worst:.2e}"

    def entropy():
        worst = math.inf
        for n in ((3,) if quick else (3, 4)):
            cases = [("identity", None), ("hadamard", None)] + [("random", s) for s in range(5)]
            for u, s in cases:
                worst = min(worst, pgm.measurement_entropy(n, 2, u, seed=s) - (n - 2))
        return worst >= 0, f"min margin over n-2 bound {worst:.4f}"

    def overlap():
        e = pgm.Ensemble.from_polys(pgm.all_polys(3, 2))
        vals = [pgm.avg_pairwise_overlap(e, k) for k in range(1, 9)]
        mono = all(a > b for a, b in zip(vals, vals[1:]))
        exact = max(abs(v - 28 / 4**k) for k, v in enumerate(vals, start=1))
        return mono and exact < 1e-12, f"k=4: {vals[3]:.6f}, decreasing={mono}"

    table.run("second moment closed form", prop1)
    table.run("pgm uniformity M=1", uniformity(1))
    table.run("pgm uniformity M=2", uniformity(2))
    table.run("ghz noise distance", ghz)
    table.run("measurement entropy bound", entropy)
    table.run("pairwise overlap", overlap)


def selftest_checks(table: CheckTable) -> None:
    from phaselearn.circuits import format_circuit, parse, phase_polynomial, random_circuit, synthesize
    from phaselearn.f2poly import derivative, format_poly, parse_poly, random_poly, stitch
    from phaselearn.harness.config import ExperimentSpec
    from phaselearn.harness.runner import run_trials

    rng = np.random.default_rng(0)

    def roundtrip():
        for _ in range(200):
            f = random_poly(7, 3, rng)
            if not stitch([derivative(f, k) for k in range(1, 8)]).equal_mod_constant(f):
                return False, "stitch mismatch"
            if parse_poly(format_poly(f)) != f:
                return False, "text format mismatch"
        return True, "200 random polynomials"

    def circuits():
        for _ in range(100):
            c = random_circuit(5, 3, 12, rng, "generators")
            f = phase_polynomial(c)
            if phase_polynomial(synthesize(f, 3)) != f or parse(format_circuit(c)).gates != c.gates:
                return False, "roundtrip mismatch"
        return True, "100 circuits"

    def learner(name, **kw):
        def check():
            spec = ExperimentSpec(learner=name, trials=10, timing=False, **kw)
            row = run_trials(spec)[0]
            return row.successes >= 9, f"{row.successes}/{row.trials}"
        return check

    table.run("derivative/stitch and text roundtrip", roundtrip)
    table.run("circuit roundtrip", circuits)
    table.run("binary learner", learner("binary", n=[6], d=2, grid=[40]))
    table.run("sparse learner", learner("sparse", n=[8], d=3, s=3, grid=[40]))
    table.run("generalized learner", learner("generalized", n=[4], d=2, grid=[80]))
    table.run("stabilizer learner", learner("stabilizer", n=[6], dim=4, grid=[80], m_support=40))
    table.run("noisy quadratic learner", learner("noisy-global", n=[8], eps=0.2, grid=[300]))
    verify_checks(table, quick=True)


# -- instance input ----------------------------------------------------------


def _read_hidden(path: str):
    from phaselearn.circuits import parse, phase_polynomial
    from phaselearn.f2poly import parse_header, parse_poly
    from phaselearn.zqpoly import parse_zq

    text = Path(path).read_text()
    first = next((ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")), "")
    body = [ln for ln in text.splitlines()[1:] if ln.strip() and not ln.lstrip().startswith("#")]
    header = parse_header(first)
    if "q" in header:
        return parse_zq(text), None
    if body and body[0].split()[0].isalpha():
        c = parse(text)
        return phase_polynomial(c), c
    return parse_poly(text), None


def cmd_learn(args: argparse.Namespace) -> int:
    from phaselearn.circuits import binary_view
    from phaselearn.f2poly import F2Poly, format_poly
    from phaselearn.harness.config import ExperimentSpec
    from phaselearn.harness.trials import run_trial
    from phaselearn import learners
    from phaselearn.oracle import PhaseOracle, parse_noise
    from phaselearn.zqpoly import ZqPoly, equivalent, format_zq

    seed = resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    noise = parse_noise(args.noise)
    if args.input is None:
        # random instance through the same path as a sweep trial
        spec = ExperimentSpec(
            learner=args.learner, n=[args.n], d=args.d, s=args.s, eps=noise.eps, gd=args.gd,
            dim=args.dim, m_support=args.m_support, decoder=args.decoder, seed=seed,
        )
        res = run_trial(spec, args.n, args.m, rng)
        print(json.dumps({"success": res.success, "status": res.status, "samples_used": res.samples_used,
                          "wall_time": round(res.wall_time, 6)}))
        return 0 if res.success else 1

    f, _ = _read_hidden(args.input)
    n = f.n
    if isinstance(f, ZqPoly) and (view := binary_view(f)) is not None and args.learner != "generalized":
        f = view
    if args.learner in ("binary", "sparse", "noisy-global", "noisy-local") and not isinstance(f, F2Poly):
        raise ConfigError(f"learner {args.learner} needs a binary polynomial")
    d = args.d or max(f.degree, 1)
    if args.learner == "binary":
        o = PhaseOracle("binary", f, rng, noise)
        rep = learners.learn_binary(o, n, d, args.m)
    elif args.learner == "sparse":
        o = PhaseOracle("binary", f, rng, noise)
        rep = learners.learn_sparse(o, n, d, args.s, args.m, decoder=args.decoder)
    elif args.learner == "generalized":
        q = f.q if isinstance(f, ZqPoly) else 1 << d
        if isinstance(f, F2Poly):
            from phaselearn.zqpoly import embed_binary

            f = embed_binary(f, q)
        o = PhaseOracle("generalized", f, rng, noise)
        rep = learners.learn_generalized(o, n, d, q, args.m)
    elif args.learner == "noisy-global":
        o = PhaseOracle("quadratic", f, rng, noise)
        rep = learners.learn_noisy_quadratic(o, n, noise.eps, args.m)
    elif args.learner == "noisy-local":
        o = PhaseOracle("quadratic", f, rng, noise)
        rep = learners.learn_local_noise_quadratic(o, n, noise.eps, args.gd, args.m)
    else:
        raise ConfigError(f"learner {args.learner} cannot read an instance file")
    out = rep.to_dict()
    if rep.ok:
        if isinstance(f, F2Poly):
            out["correct"] = rep.result.equal_mod_constant(f)
            text = format_poly(rep.result)
        else:
            out["correct"] = equivalent(rep.result, f)
            text = format_zq(rep.result)
        if args.out:
            Path(args.out).write_text(text)
    print(json.dumps(out, default=str))
    return 0 if rep.ok and out.get("correct") else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    from phaselearn.harness.runner import emit, run_trials, scaling_study, write_csv

    overrides = list(args.overrides)
    if args.seed is not None or SEED_ENV in os.environ:
        overrides.append(f"seed={resolve_seed(args.seed)}")
    if args.workers:
        overrides.append(f"workers={args.workers}")
    spec = load_spec(args.config, overrides)
    if args.fit:
        fit, thresholds, rows = scaling_study(spec, args.target)
        emit(spec, rows)
        for n, m in thresholds:
            print(f"# threshold n={n} m*={m} total={n * m}", file=sys.stderr)
        print(f"# exponent {fit}", file=sys.stderr)
        if args.expect:
            lo, hi = (float(v) for v in args.expect.split(","))
            return 0 if lo <= fit.exponent <= hi else 1
        return 0
    rows = run_trials(spec)
    emit(spec, rows)
    if args.min_rate is not None:
        return 0 if all(r.success_rate >= args.min_rate for r in rows) else 1
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    table = CheckTable()
    verify_checks(table, quick=args.quick)
    return table.summary()


def cmd_reconstruct(args: argparse.Namespace) -> int:
    from phaselearn.circuits import (
        ReconstructionFailed,
        binary_view,
        circuits_equivalent,
        format_circuit,
        parse,
        phase_polynomial,
        reconstruct,
    )
    from phaselearn.oracle import PhaseOracle

    hidden = parse(Path(args.circuit).read_text())
    rng = np.random.default_rng(resolve_seed(args.seed))
    f = phase_polynomial(hidden)
    view = binary_view(f)
    o = PhaseOracle("binary", view, rng) if view is not None else PhaseOracle("generalized", f, rng)
    start = time.perf_counter()
    try:
        learned = reconstruct(o, hidden.n, hidden.d, args.m, hidden.hadamard_frame)
    except ReconstructionFailed as exc:
        print(f"verdict: failed ({exc.report.status}), copies used {o.copies_used}")
        return 1
    text = format_circuit(learned)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    same = circuits_equivalent(learned, hidden)
    print(
        f"verdict: {'equivalent' if same else 'NOT equivalent'}, copies used {o.copies_used}, "
        f"{time.perf_counter() - start:.3f}s",
        file=sys.stderr if not args.out else sys.stdout,
    )
    return 0 if same else 1


def cmd_selftest(args: argparse.Namespace) -> int:
    table = CheckTable()
    selftest_checks(table)
    return table.summary()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phaselearn", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", help="learn one instance")
    learn.add_argument("--learner", choices=LEARNERS, default="binary")
    learn.add_argument("--input", help="polynomial or circuit file; random instance if omitted")
    learn.add_argument("--noise", default="none", help="none | global:<eps> | local:<eps>")
    learn.add_argument("-n", type=int, default=8)
    learn.add_argument("-d", type=int, default=2)
    learn.add_argument("-m", type=int, default=64, help="samples per round (Bell samples for noisy learners)")
    learn.add_argument("-s", type=int, default=4, help="sparsity bound")
    learn.add_argument("--gd", type=int, default=2)
    learn.add_argument("--dim", type=int, default=5, help="stabilizer support dimension")
    learn.add_argument("--m-support", type=int, default=40)
    learn.add_argument("--decoder", choices=("round", "joint"), default="round")
    learn.add_argument("--out", help="write the learned polynomial here")
    learn.add_argument("--seed", type=int)
    learn.set_defaults(func=cmd_learn)

    sweep = sub.add_parser("sweep", help="success rate over an (n, m) grid")
    sweep.add_argument("--config", help="key=value config file")
    sweep.add_argument("overrides", nargs="*", help="key=value overrides")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--fit", action="store_true", help="bisect the threshold m* per n and fit log m* vs log n")
    sweep.add_argument("--target", type=float, default=0.95)
    sweep.add_argument("--expect", help="lo,hi: exit nonzero unless the exponent lies inside")
    sweep.add_argument("--min-rate", type=float, help="exit nonzero if any grid point is below this rate")
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", help="dense numerical checks")
    verify.add_argument("--quick", action="store_true")
    verify.set_defaults(func=cmd_verify)

    rec = sub.add_parser("reconstruct", help="learn a hidden circuit through its phase state")
    rec.add_argument("circuit")
    rec.add_argument("-m", type=int, default=512, help="samples per round")
    rec.add_argument("--out")
    rec.add_argument("--seed", type=int)
    rec.set_defaults(func=cmd_reconstruct)

    st = sub.add_parser("selftest", help="fast end-to-end smoke checks")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
