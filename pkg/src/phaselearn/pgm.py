"""Dense state-vector numerics for small phase-state ensembles.

Everything here is exact linear algebra on vectors of length 2^(n*M), so
it is limited to a total of DENSE_CAP qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from phaselearn.f2poly import F2Poly, monomial_order
from phaselearn.zqpoly import ZqPoly

DENSE_CAP = 14
EIG_THRESHOLD = 1e-10
ENUM_CAP = 1 << 20


class CapExceeded(ValueError):
    pass


def _check_cap(qubits: int, cap: int = DENSE_CAP) -> None:
    if qubits > cap:
        raise CapExceeded(f"{qubits} qubits exceed the dense cap of {cap}")


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError("amplitude vector has the wrong length")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"state not normalized (norm {norm})")

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor_power(self, M: int) -> np.ndarray:
        _check_cap(self.n * M)
        out = np.ones(1, dtype=complex)
        for _ in range(M):
            out = np.kron(out, self.amplitudes)
        return out


def _phases(f: F2Poly | ZqPoly) -> np.ndarray:
    if isinstance(f, F2Poly):
        return 1.0 - 2.0 * f.truth_table().astype(float)
    return np.exp(2j * np.pi * f.values().astype(float) / f.q)


def build_state(f: F2Poly | ZqPoly, cap: int = DENSE_CAP) -> StateVector:
    """The phase state of f as a dense vector, index x = sum_i x_i 2^(i-1)."""
    _check_cap(f.n, cap)
    amps = _phases(f).astype(complex) / math.sqrt(1 << f.n)
    return StateVector(f.n, amps)


@dataclass
class Ensemble:
    members: list[StateVector]
    copies: int = 1
    labels: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("empty ensemble")
        n = self.members[0].n
        if any(s.n != n for s in self.members):
            raise ValueError("members have different qubit counts")
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        _check_cap(n * self.copies)
        if self.labels and len(set(self.labels)) != len(self.labels):
            raise ValueError("ensemble labels must be distinct")

    @classmethod
    def from_polys(cls, polys: Sequence[F2Poly | ZqPoly], copies: int = 1) -> "Ensemble":
        return cls([build_state(f) for f in polys], copies, list(polys))

    @property
    def n(self) -> int:
        return self.members[0].n

    def gram(self) -> np.ndarray:
        V = np.array([s.amplitudes for s in self.members])
        return (V.conj() @ V.T) ** self.copies

    def matrix(self) -> np.ndarray:
        """Columns are the M-fold tensor powers of the members."""
        return np.array([s.tensor_power(self.copies) for s in self.members]).T


def all_polys(n: int, d: int, constant: bool = False) -> list[F2Poly]:
    cols = monomial_order(n, d)
    if not constant:
        cols = cols[1:]
    if len(cols) > 24:
        raise CapExceeded(f"2^{len(cols)} polynomials is too many to enumerate")
    out = []
    for mask in range(1 << len(cols)):
        out.append(F2Poly(n, frozenset(c for i, c in enumerate(cols) if (mask >> i) & 1)))
    return out


def _truth_tables(n: int, d: int, masks: np.ndarray) -> np.ndarray:
    """Rows are (+/-1) phase vectors of the polynomials selected by coefficient masks."""
    cols = monomial_order(n, d)[1:]
    x = np.arange(1 << n)
    evals = np.array([(x & c) == c for c in cols], dtype=np.int64)
    coeff = ((masks[:, None] >> np.arange(len(cols))[None, :]) & 1).astype(np.int64)
    return 1.0 - 2.0 * ((coeff @ evals) & 1)


@dataclass
class SecondMoment:
    average: np.ndarray
    closed_form: np.ndarray
    max_diff: float
    samples: int
    stderr: float | None


def second_moment_closed_form(n: int) -> np.ndarray:
    D = 1 << n
    eye = np.eye(D * D)
    swap = np.zeros((D * D, D * D))
    for a in range(D):
        for b in range(D):
            swap[a * D + b, b * D + a] = 1.0
    phi = np.zeros(D * D)
    phi[[x * D + x for x in range(D)]] = 1 / math.sqrt(D)
    diag = np.zeros(D * D)
    diag[[x * D + x for x in range(D)]] = 1.0
    return (eye + swap) / D**2 + np.outer(phi, phi) / D - 2 / D**2 * np.diag(diag)


def second_moment_average(
    n: int,
    d: int,
    rng: np.random.Generator | None = None,
    mc_samples: int = 1 << 16,
    batch: int = 1 << 12,
) -> SecondMoment:
    """Average of (|psi_f><psi_f|)^(x2) over f in P(n, d) against its closed form.

    Enumerates P(n, d) when it has at most ENUM_CAP members, else averages
    ``mc_samples`` uniform draws and reports the largest entrywise standard error.
    """
    if d < 2:
        raise ValueError("closed form needs d >= 2")
    if n > 5:
        raise CapExceeded("second moment limited to n <= 5")
    D = 1 << n
    ncols = len(monomial_order(n, d)) - 1
    exact = (1 << ncols) <= ENUM_CAP
    total = (1 << ncols) if exact else mc_samples
    if not exact and rng is None:
        raise ValueError("Monte Carlo mode needs an rng")
    acc = np.zeros((D * D, D * D))
    acc2 = None if exact else np.zeros((D * D, D * D))
    for start in range(0, total, batch):
        size = min(batch, total - start)
        if exact:
            masks = np.arange(start, start + size, dtype=np.int64)
        else:
            masks = rng.integers(0, 1 << ncols, size=size, dtype=np.int64)
        signs = _truth_tables(n, d, masks)
        pair = (signs[:, :, None] * signs[:, None, :]).reshape(size, D * D) / D
        acc += pair.T @ pair
        if acc2 is not None:
            acc2 += (pair**2).T @ (pair**2)
    avg = acc / total
    stderr = None
    if acc2 is not None:
        var = np.maximum(acc2 / total - avg**2, 0.0)
        stderr = float(np.sqrt(var.max() / total))
    closed = second_moment_closed_form(n)
    return SecondMoment(avg, closed, float(np.abs(avg - closed).max()), total, stderr)


@dataclass
class PGMResult:
    probabilities: np.ndarray
    rank: int
    completeness_error: float


def pgm_measurement(ensemble: Ensemble) -> PGMResult:
    """Success probabilities of the pretty good measurement, plus a completeness check.

    S = V V^dag is diagonalized through the SVD of V (columns are the copies
    of each member), so S^(-1/2) is applied only on its support.
    """
    V = ensemble.matrix()
    U, sing, _ = np.linalg.svd(V, full_matrices=False)
    keep = sing**2 > EIG_THRESHOLD
    U, sing = U[:, keep], sing[keep]
    # S^(-1/2) |v_f> for every f, in the basis U of the support
    W = (U.conj().T @ V) / sing[:, None]
    probs = np.abs(np.einsum("rf,rf->f", (U.conj().T @ V).conj(), W)) ** 2
    resid = V - U @ (U.conj().T @ V)
    err = float(np.abs(W @ W.conj().T - np.eye(len(sing))).max())
    err = max(err, float(np.abs(resid).max()) if resid.size else 0.0)
    return PGMResult(probs.real, int(keep.sum()), err)


def pgm_success(ensemble: Ensemble) -> np.ndarray:
    return pgm_measurement(ensemble).probabilities


def avg_pairwise_overlap(ensemble: Ensemble, k: int) -> float:
    """(1/m) sum over ordered pairs f != g of |<psi_f|psi_g>|^(2k)."""
    V = np.array([s.amplitudes for s in ensemble.members])
    m = len(V)
    ov = np.abs(V.conj() @ V.T) ** (2 * k)
    return float((ov.sum() - np.trace(ov)) / m)


def _depolarize(rho: np.ndarray, n: int, eps: float) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    for j in range(n):
        # axes j (ket) and n + j (bra) of qubit j
        reduced = np.trace(t, axis1=j, axis2=n + j)
        mixed = np.multiply.outer(np.eye(2), reduced) / 2
        mixed = np.moveaxis(mixed, (0, 1), (j, n + j))
        t = (1 - eps) * t + eps * mixed
    return t.reshape(1 << n, 1 << n)


def ghz_noise_distance(n: int, eps: float) -> float:
    """Trace norm between the depolarized (|0^n> +/- |1^n>)/sqrt2 states."""
    _check_cap(n)
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    D = 1 << n
    out = []
    for sign in (1, -1):
        v = np.zeros(D)
        v[0], v[D - 1] = 1 / math.sqrt(2), sign / math.sqrt(2)
        out.append(_depolarize(np.outer(v, v), n, eps))
    return float(np.abs(np.linalg.eigvalsh(out[0] - out[1])).sum())


def hadamard_all(n: int) -> np.ndarray:
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, h)
    return out


def resolve_unitary(n: int, choice: str | np.ndarray, seed: int | None = None) -> np.ndarray:
    if isinstance(choice, np.ndarray):
        return choice
    if choice == "identity":
        return np.eye(1 << n)
    if choice == "hadamard":
        return hadamard_all(n)
    if choice == "random":
        return unitary_group.rvs(1 << n, random_state=seed)
    raise ValueError(f"unknown unitary {choice!r}")


def shannon_entropy(p: np.ndarray) -> np.ndarray:
    """Entropy in bits along the last axis."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)


def measurement_entropy(n: int, d: int, unitary: str | np.ndarray = "identity", seed: int | None = None) -> float:
    """Mean over all f in P(n, d) of the entropy of measuring U|psi_f> in the computational basis."""
    if n > 4:
        raise CapExceeded("measurement entropy is exhaustive and limited to n <= 4")
    if d < 2:
        raise ValueError("need d >= 2")
    U = resolve_unitary(n, unitary, seed)
    ncols = len(monomial_order(n, d)) - 1
    total = 1 << ncols
    acc = 0.0
    for start in range(0, total, 1 << 12):
        masks = np.arange(start, min(start + (1 << 12), total), dtype=np.int64)
        states = _truth_tables(n, d, masks) / math.sqrt(1 << n)
        probs = np.abs(states @ U.T) ** 2
        acc += shannon_entropy(probs).sum()
    return float(acc / total)


__all__ = [
    "DENSE_CAP",
    "CapExceeded",
    "StateVector",
    "Ensemble",
    "SecondMoment",
    "PGMResult",
    "build_state",
    "all_polys",
    "second_moment_average",
    "second_moment_closed_form",
    "pgm_measurement",
    "pgm_success",
    "avg_pairwise_overlap",
    "ghz_noise_distance",
    "measurement_entropy",
    "resolve_unitary",
    "hadamard_all",
]
