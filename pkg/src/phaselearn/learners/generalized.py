"""Separable-measurement learners for generalized (Z_q) phase states and stabilizer states.

Each round yields disequalities g(y) != b for the unknown derivative g in
P_q(n-1, d-1).  ``identify_derivative`` finds the unique g consistent with
all of them, either by enumerating every candidate coefficient vector
(``brute``) or, past the candidate cap, by pinning g(y) wherever all q-1
wrong values have been excluded and solving the resulting system over
Z_{2^e} one bit at a time (``lift``).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from phaselearn.f2poly import drop_index, insert_index, monomial_order
from phaselearn.f2solve import StabSupport, affine_basis, gauss_solve
from phaselearn.oracle import OracleKindError, PhaseOracle
from phaselearn.zqpoly import ZqPoly, from_values
from phaselearn.learners.report import LearnReport, accounting, pack_bits

DEFAULT_CANDIDATE_CAP = 1 << 24

Sampler = Callable[[int, int], "tuple[np.ndarray, np.ndarray]"]


class IdentifyFailure(Exception):
    def __init__(self, status: str, detail: str = "") -> None:
        super().__init__(f"{status}: {detail}" if detail else status)
        self.status = status


def _eval_columns(y: np.ndarray, cols: tuple[int, ...]) -> np.ndarray:
    colarr = np.asarray(cols, dtype=np.int64)
    return ((y[:, None] & colarr[None, :]) == colarr[None, :]).astype(np.int64)


def _brute(A: np.ndarray, b: np.ndarray, q: int, chunk: int = 1 << 14) -> np.ndarray:
    """Every coefficient vector in Z_q^N with (A beta)_k != b_k for all k."""
    N = A.shape[1]
    total = q**N
    # Candidate index -> digits in base q, most significant first.
    weights = q ** np.arange(N - 1, -1, -1, dtype=np.int64)
    survivors = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cand = (idx[:, None] // weights[None, :]) % q
        alive = np.ones(len(cand), dtype=bool)
        for lo in range(0, len(b), 256):
            live = np.flatnonzero(alive)
            if not live.size:
                break
            vals = (cand[live] @ A[lo:lo + 256].T) % q
            alive[live] = np.all(vals != b[lo:lo + 256][None, :], axis=1)
        survivors.extend(cand[alive])
        if len(survivors) > 1:
            break
    return np.asarray(survivors, dtype=np.int64).reshape(-1, N)


def _lift(y: np.ndarray, b: np.ndarray, cols: tuple[int, ...], q: int) -> np.ndarray:
    excluded: dict[int, set[int]] = {}
    for yy, bb in zip(y.tolist(), b.tolist()):
        excluded.setdefault(yy, set()).add(bb)
    pinned = {yy: (set(range(q)) - ex).pop() for yy, ex in excluded.items() if len(ex) == q - 1}
    if not pinned:
        raise IdentifyFailure("ambiguous", "no point has all wrong values excluded")
    pts = np.fromiter(pinned.keys(), dtype=np.int64)
    vals = np.fromiter(pinned.values(), dtype=np.int64)
    A = _eval_columns(pts, cols)
    rows = [pack_bits(r) for r in A]
    # A is 0/1, so beta = sum_i 2^i beta_i with each beta_i solved mod 2.
    beta = np.zeros(len(cols), dtype=np.int64)
    resid = vals.copy()
    bits = q.bit_length() - 1
    for i in range(bits):
        out = gauss_solve((rows, len(cols)), pack_bits(resid & 1))
        if not out.unique:
            raise IdentifyFailure("ambiguous" if out.status == "ambiguous" else "inconsistent", "pinned system")
        bi = np.array([(out.solution >> c) & 1 for c in range(len(cols))], dtype=np.int64)
        beta += bi << i
        resid = (resid - A @ bi) // 2
    return beta % q


def identify_derivative(
    y: np.ndarray,
    b: np.ndarray,
    nvars: int,
    max_degree: int,
    q: int,
    mode: str = "auto",
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> ZqPoly:
    """The unique g in P_q(nvars, max_degree) with g(y_k) != b_k for every sample."""
    cols = monomial_order(nvars, max_degree)
    count = q ** len(cols)
    if mode == "auto":
        mode = "brute" if count <= cap else "lift"
    if mode == "brute":
        if count > cap:
            raise IdentifyFailure("cap", f"{count} candidates exceed cap {cap}")
        found = _brute(_eval_columns(y, cols), b, q)
        if len(found) != 1:
            raise IdentifyFailure("ambiguous" if len(found) else "inconsistent", f"{len(found)} survivors")
        beta = found[0]
    elif mode == "lift":
        if q & (q - 1):
            raise ValueError("lifting needs q a power of two")
        beta = _lift(y, b, cols, q)
        vals = (_eval_columns(y, cols) @ beta) % q
        if np.any(vals == b):
            raise IdentifyFailure("inconsistent", "lifted solution violates a constraint")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ZqPoly(nvars, q, {m: int(c) for m, c in zip(cols, beta)})


def reconstruct_from_derivatives(derivs: list[ZqPoly], d: int) -> ZqPoly:
    """Recover f (with f(0) = 0) from g_t(y) = f(y^{t=1}) - f(y^{t=0}).

    Values are filled in by Hamming weight: a point x of weight w+1 is
    y^{t=1} for t its lowest set bit, and y^{t=0} has weight w.  Weights up
    to d determine a degree-d polynomial.
    """
    n = len(derivs)
    q = derivs[0].q if derivs else 2
    known = {0: 0}
    for x in sorted(monomial_order(n, d)[1:], key=lambda v: bin(v).count("1")):
        t = (x & -x).bit_length()
        below = x & ~(1 << (t - 1))
        known[x] = (known[below] + derivs[t - 1].eval(drop_index(x, t))) % q
    return from_values(n, q, known, d)


def _learn_rounds(
    sampler: Sampler,
    n: int,
    d: int,
    q: int,
    m_per_round: int,
    mode: str,
    cap: int,
    report: LearnReport,
    coords: Callable[[int, np.ndarray], np.ndarray] | None = None,
) -> ZqPoly | None:
    derivs = []
    for t in range(1, n + 1):
        y, b = sampler(t, m_per_round)
        if coords is not None:
            y = coords(t, y)
        try:
            g = identify_derivative(y, b, n - 1, d - 1, q, mode, cap)
        except IdentifyFailure as exc:
            report.per_round.append({"round": t, "status": exc.status})
            report.status = exc.status
            return None
        report.per_round.append({"round": t, "status": "ok", "distinct_y": int(np.unique(y).size)})
        derivs.append(g)
    return reconstruct_from_derivatives(derivs, d)


def learn_generalized(
    o: PhaseOracle,
    n: int,
    d: int,
    q: int,
    m_per_round: int,
    mode: str = "auto",
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> LearnReport:
    """Learn f in P_q(n, d) up to an additive constant from POVM samples."""
    if o.kind != "generalized":
        raise OracleKindError(f"generalized learner got a {o.kind} oracle")
    if o.n != n:
        raise ValueError(f"oracle has {o.n} qubits, learner asked for {n}")
    if q != 2**d:
        raise ValueError(f"learner expects q = 2^d, got q={q}, d={d}")
    report = LearnReport(None)
    with accounting(o, report):
        report.result = _learn_rounds(o.povm_sample, n, d, q, m_per_round, mode, cap, report)
    return report


class SupportUndersampled(Exception):
    pass


def _frame_coords(frame: StabSupport) -> Callable[[int, np.ndarray], np.ndarray]:
    pivots = frame.pivots
    pivot_mask = sum(1 << p for p in pivots)
    nonpivot = ((1 << frame.n) - 1) & ~pivot_mask

    def convert(t: int, y: np.ndarray) -> np.ndarray:
        w = np.array([insert_index(int(v), pivots[t - 1] + 1, 0) for v in y], dtype=np.int64)
        if np.any(w & nonpivot):
            raise SupportUndersampled("outcome outside the learned support")
        u = np.zeros_like(w)
        j = 0
        for i, p in enumerate(pivots):
            if i == t - 1:
                continue
            u |= ((w >> p) & 1) << j
            j += 1
        return u

    return convert


def pull_back(h: ZqPoly, frame: StabSupport) -> ZqPoly:
    """The polynomial on n bits equal to h(u(x)), with u_i(x) = x_{p_i} xor a_{p_i}."""
    q = h.q
    acc: dict[int, int] = {}
    pivots = frame.pivots
    for mono, c in h.coeffs.items():
        plain = 0
        flipped = []
        for i, p in enumerate(pivots):
            if (mono >> i) & 1:
                if (frame.a >> p) & 1:
                    flipped.append(1 << p)
                else:
                    plain |= 1 << p
        # prod over flipped of (1 - x_p) = sum over subsets T of (-1)^|T| x_T
        for r in range(1 << len(flipped)):
            sub = plain
            sign = 1
            for j, bit in enumerate(flipped):
                if (r >> j) & 1:
                    sub |= bit
                    sign = -sign
            acc[sub] = acc.get(sub, 0) + sign * c
    return ZqPoly(frame.n, q, acc)


def learn_stabilizer(
    o: PhaseOracle,
    n: int,
    m_support: int,
    m_per_round: int,
    mode: str = "auto",
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> LearnReport:
    """Learn a stabilizer state sum_{x in A} i^{f(x)} |x>: the support A, then f on it.

    The phase is returned as a polynomial on all n bits that depends only on
    the pivot coordinates of the learned frame and vanishes at its base
    point a; it agrees with the hidden phase on A up to a constant.
    """
    if o.kind != "stabilizer":
        raise OracleKindError(f"stabilizer learner got a {o.kind} oracle")
    if o.n != n:
        raise ValueError(f"oracle has {o.n} qubits, learner asked for {n}")
    q, d = 4, 2
    report = LearnReport(None)
    with accounting(o, report):
        points = [int(v) for v in o.basis_sample(m_support)]
        frame = affine_basis(points, n)
        half = affine_basis(points[: (len(points) + 1) // 2], n)
        report.support = frame
        report.per_round.append({"round": 0, "support_dim": frame.dim, "half_dim": half.dim})
        if half.dim != frame.dim:
            report.status = "support-undersampled"
            return report
        k = frame.dim
        if k == 0:
            report.result = ZqPoly(n, q, {})
            return report
        try:
            h = _learn_rounds(
                lambda t, m: o.frame_povm_sample(frame, t, m),
                k, d, q, m_per_round, mode, cap, report,
                coords=_frame_coords(frame),
            )
        except SupportUndersampled:
            report.status = "support-undersampled"
            return report
        if h is not None:
            report.result = pull_back(h, frame)
    return report


def stabilizer_equivalent(g: ZqPoly, f: ZqPoly, support: StabSupport) -> bool:
    """True iff g - f is constant on the affine support."""
    diffs = {(g.eval(x) - f.eval(x)) % f.q for x in support.elements()}
    return len(diffs) == 1


def suggested_rounds(q: int, d: int, n: int, c: float = 1.0) -> int:
    """c * q^3 * 2^d * n * log(q) samples per round."""
    return max(1, math.ceil(c * q**3 * 2**d * n * math.log(q)))


__all__ = [
    "identify_derivative",
    "reconstruct_from_derivatives",
    "learn_generalized",
    "learn_stabilizer",
    "pull_back",
    "stabilizer_equivalent",
    "suggested_rounds",
    "IdentifyFailure",
    "DEFAULT_CANDIDATE_CAP",
]
