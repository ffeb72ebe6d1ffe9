"""One trial = one fresh hidden instance, one sealed oracle, one learner run."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from phaselearn.circuits import (
    ReconstructionFailed,
    binary_view,
    circuits_equivalent,
    phase_polynomial,
    random_circuit,
    reconstruct,
)
from phaselearn.f2poly import random_poly, random_sparse_poly
from phaselearn.f2solve import random_affine_support
from phaselearn.learners import (
    learn_binary,
    learn_generalized,
    learn_local_noise_quadratic,
    learn_noisy_quadratic,
    learn_sparse,
    learn_stabilizer,
    stabilizer_equivalent,
)
from phaselearn.learners.noisy import random_bounded_quadratic
from phaselearn.oracle import Noise, PhaseOracle
from phaselearn.zqpoly import equivalent, random_stabilizer_phase, random_zq_poly
from phaselearn.harness.config import ExperimentSpec


@dataclass(frozen=True)
class TrialResult:
    success: bool
    status: str
    samples_used: int
    wall_time: float


def trial_rng(seed: int, point: int, trial: int) -> np.random.Generator:
    """Independent stream for (grid point, trial); does not depend on execution order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, trial)))


def run_trial(spec: ExperimentSpec, n: int, m: int, rng: np.random.Generator) -> TrialResult:
    start = time.perf_counter()
    kind = spec.learner
    d = spec.d
    if kind == "binary":
        f = random_poly(n, d, rng)
        o = PhaseOracle("binary", f, rng)
        rep = learn_binary(o, n, d, m)
        ok = rep.ok and rep.result.equal_mod_constant(f)
    elif kind == "sparse":
        f = random_sparse_poly(n, d, spec.s, rng)
        o = PhaseOracle("binary", f, rng)
        rep = learn_sparse(o, n, d, spec.s, m, decoder=spec.decoder)
        ok = rep.ok and rep.result.equal_mod_constant(f)
    elif kind == "generalized":
        q = spec.modulus
        f = random_zq_poly(n, d, q, rng)
        o = PhaseOracle("generalized", f, rng)
        rep = learn_generalized(o, n, d, q, m)
        ok = rep.ok and equivalent(rep.result, f)
    elif kind == "stabilizer":
        sup = random_affine_support(n, min(spec.dim, n), rng)
        f = random_stabilizer_phase(n, rng)
        o = PhaseOracle("stabilizer", f, rng, support=sup)
        rep = learn_stabilizer(o, n, spec.m_support, m)
        ok = rep.ok and rep.support.same_set(sup) and stabilizer_equivalent(rep.result, f, sup)
    elif kind in ("noisy-global", "noisy-local"):
        if kind == "noisy-global":
            f = random_poly(n, 2, rng).drop_constant()
            o = PhaseOracle("quadratic", f, rng, Noise("global", spec.eps))
            rep = learn_noisy_quadratic(o, n, spec.eps, m)
        else:
            f = random_bounded_quadratic(n, spec.gd, rng)
            o = PhaseOracle("quadratic", f, rng, Noise("local", spec.eps))
            rep = learn_local_noise_quadratic(o, n, spec.eps, spec.gd, m)
        ok = rep.ok and rep.result == f
    elif kind in ("circuit-binary", "circuit-dyadic"):
        mode = "binary" if kind == "circuit-binary" else "generators"
        c = random_circuit(n, d, spec.gates, rng, mode)
        f = phase_polynomial(c)
        o = PhaseOracle("binary", binary_view(f), rng) if mode == "binary" else PhaseOracle("generalized", f, rng)
        try:
            ok = circuits_equivalent(reconstruct(o, n, d, m), c)
            status = "ok" if ok else "wrong"
        except ReconstructionFailed as exc:
            ok, status = False, exc.report.status
        return TrialResult(bool(ok), status, o.copies_used, time.perf_counter() - start)
    else:
        raise ValueError(f"unknown learner {kind!r}")
    status = rep.status if not (rep.ok and not ok) else "wrong"
    return TrialResult(bool(ok), status, rep.samples_used, time.perf_counter() - start)
