"""Bell-sampling learners for degree-2 phase states under depolarizing noise.

Row i of B = A + A^T is an LPN secret: each Bell sample gives z and a
noisy label (w_z)_i = B^i . z.  Rows are decoded by exact maximum
likelihood, the off-diagonal part is undone on fresh copies, and the
remaining linear phase (the diagonal of A) is read off by majority over
Bernstein-Vazirani runs.
"""

from __future__ import annotations

import math

import numpy as np

from phaselearn.f2poly import F2Poly
from phaselearn.oracle import OracleKindError, PhaseOracle
from phaselearn.learners.report import LearnReport, accounting

ML_CAP = 24


class LPNTie(Exception):
    """Two or more secrets share the maximal agreement count."""


def walsh_hadamard(h: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform along a length-2^n vector."""
    h = np.array(h, dtype=np.int64, copy=True)
    size = h.size
    step = 1
    while step < size:
        view = h.reshape(-1, 2, step)
        a = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = a - view[:, 1, :]
        step *= 2
    return h


def lpn_agreements(z: np.ndarray, labels: np.ndarray, n: int) -> np.ndarray:
    """For every candidate c in F2^n, the number of samples with c.z = label.

    Equivalent to the direct count but computed with one Walsh-Hadamard
    transform of the signed label histogram.
    """
    if n > ML_CAP:
        raise ValueError(f"n={n} above the maximum-likelihood cap {ML_CAP}")
    signs = 1 - 2 * (np.asarray(labels, dtype=np.int64) & 1)
    hist = np.zeros(1 << n, dtype=np.int64)
    np.add.at(hist, np.asarray(z, dtype=np.int64), signs)
    corr = walsh_hadamard(hist)
    return (len(signs) + corr) // 2


def lpn_decode(z: np.ndarray, labels: np.ndarray, n: int, eta: float, cap: int = ML_CAP) -> int:
    """Maximum-likelihood secret for labels = c.z flipped with probability < 1/2.

    Raises LPNTie when the maximum is not unique.
    """
    if eta <= 0:
        raise ValueError("correlation must be positive")
    if n > cap:
        raise ValueError(f"n={n} above the maximum-likelihood cap {cap}")
    agree = lpn_agreements(z, labels, n)
    best = agree.max()
    winners = np.flatnonzero(agree == best)
    if winners.size > 1:
        raise LPNTie(f"{winners.size} secrets reach {best} agreements")
    return int(winners[0])


def majority_repeats(n: int, eps: float) -> int:
    return math.ceil(24 * math.log(max(n, 2)) / (1 - eps) ** 2)


def quadratic_from_rows(rows: list[int], diag: int, n: int) -> F2Poly:
    monos = set()
    for i in range(n):
        for j in range(i + 1, n):
            if (rows[i] >> j) & 1:
                monos.add((1 << i) | (1 << j))
        if (diag >> i) & 1:
            monos.add(1 << i)
    return F2Poly(n, frozenset(monos))


def graph_degree(f: F2Poly) -> int:
    """Maximum row weight of B = A + A^T for a degree-2 f."""
    deg = [0] * f.n
    for m in f.monomials:
        if bin(m).count("1") == 2:
            i = (m & -m).bit_length() - 1
            j = m.bit_length() - 1
            deg[i] += 1
            deg[j] += 1
    return max(deg, default=0)


def random_bounded_quadratic(n: int, gd: int, rng: np.random.Generator, density: float = 0.5) -> F2Poly:
    """Random x^T A x whose graph has maximum degree <= gd, plus random linear terms."""
    deg = [0] * n
    monos = set()
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for e in rng.permutation(len(edges)):
        i, j = edges[e]
        if deg[i] < gd and deg[j] < gd and rng.random() < density:
            monos.add((1 << i) | (1 << j))
            deg[i] += 1
            deg[j] += 1
    for i in range(n):
        if rng.random() < 0.5:
            monos.add(1 << i)
    return F2Poly(n, frozenset(monos))


def _decode_quadratic(
    o: PhaseOracle,
    n: int,
    eps: float,
    z: np.ndarray,
    w: np.ndarray,
    eta: float,
    report: LearnReport,
) -> F2Poly | None:
    rows = []
    for i in range(n):
        labels = (w >> i) & 1
        try:
            rows.append(lpn_decode(z, labels, n, eta))
        except LPNTie:
            report.per_round.append({"row": i + 1, "status": "tie"})
            report.status = "lpn-tie"
            return None
        report.per_round.append({"row": i + 1, "status": "ok"})
    for i in range(n):
        if (rows[i] >> i) & 1 or any(((rows[i] >> j) & 1) != ((rows[j] >> i) & 1) for j in range(n)):
            report.status = "asymmetric"
            return None
    off = quadratic_from_rows(rows, 0, n)
    residual = o.apply_correction(off)
    reps = majority_repeats(n, eps)
    outs = residual.bv_sample(reps)
    ones = np.array([int(np.count_nonzero((outs >> i) & 1)) for i in range(n)])
    if np.any(2 * ones == reps):
        report.status = "majority-inconclusive"
        return None
    diag = sum(1 << i for i in range(n) if 2 * ones[i] > reps)
    report.per_round.append({"bv_repeats": reps})
    return quadratic_from_rows(rows, diag, n)


def _check(o: PhaseOracle, n: int, eps: float, noise_kind: str) -> None:
    if o.kind not in ("quadratic", "binary"):
        raise OracleKindError(f"noisy quadratic learner got a {o.kind} oracle")
    if o.n != n:
        raise ValueError(f"oracle has {o.n} qubits, learner asked for {n}")
    if not 0 <= eps < 1:
        raise ValueError("need 0 <= eps < 1")
    if o.noise.kind not in ("none", noise_kind):
        raise OracleKindError(f"oracle carries {o.noise.kind} noise, learner expects {noise_kind}")


def learn_noisy_quadratic(o: PhaseOracle, n: int, eps: float, m: int) -> LearnReport:
    """Learn f(x) = x^T A x from copies under global depolarizing noise of strength eps."""
    _check(o, n, eps, "global")
    report = LearnReport(None)
    with accounting(o, report):
        z, w = o.bell_sample(m)
        report.result = _decode_quadratic(o, n, eps, z, w, (1 - eps) ** 2 / 2, report)
    return report


def learn_local_noise_quadratic(o: PhaseOracle, n: int, eps: float, gd_bound: int, m: int) -> LearnReport:
    """As learn_noisy_quadratic, under local noise with a graph-degree promise."""
    _check(o, n, eps, "local")
    report = LearnReport(None)
    with accounting(o, report):
        z, w = o.bell_sample_local(m)
        eta = (1 - eps) ** (2 * (gd_bound + 1))
        f = _decode_quadratic(o, n, eps, z, w, eta, report)
        if f is not None and graph_degree(f) > gd_bound:
            report.status = "degree-bound-violated"
            f = None
        report.result = f
    return report


__all__ = [
    "LPNTie",
    "lpn_agreements",
    "lpn_decode",
    "walsh_hadamard",
    "majority_repeats",
    "graph_degree",
    "quadratic_from_rows",
    "random_bounded_quadratic",
    "learn_noisy_quadratic",
    "learn_local_noise_quadratic",
    "ML_CAP",
]
