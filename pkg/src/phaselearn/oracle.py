"""Sample-level simulation of the measurements a learner can make on phase states.

A :class:`PhaseOracle` hides a polynomial and hands out only measurement
outcomes.  Every primitive draws directly from the exact outcome
distribution; nothing of size 2^n is ever built.  Each call charges the
number of state copies it consumes to ``counters``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from phaselearn.f2poly import F2Poly, derivative, popcount
from phaselearn.f2solve import StabSupport
from phaselearn.zqpoly import ZqPoly, derivative_q

__all__ = [
    "Noise",
    "BellSample",
    "PhaseOracle",
    "OracleKindError",
    "StabSupport",
    "eval_many",
    "eval_many_q",
    "reveal",
    "parse_noise",
]

Hidden = Union[F2Poly, ZqPoly]


class OracleKindError(TypeError):
    """A primitive was requested that the oracle's state does not support."""


@dataclass(frozen=True)
class Noise:
    kind: str = "none"  # "none" | "global" | "local"
    eps: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("none", "global", "local"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError("noise strength must lie in [0, 1]")
        if self.kind == "none" and self.eps:
            raise ValueError("noise=none cannot carry a strength")

    @property
    def clean(self) -> bool:
        return self.kind == "none" or self.eps == 0.0

    def __str__(self) -> str:
        return "none" if self.kind == "none" else f"{self.kind}:{self.eps:g}"


def parse_noise(text: str) -> Noise:
    """Parse ``none``, ``global:0.2`` or ``local:0.1`` (a leading ``noise=`` is allowed)."""
    text = text.strip()
    if text.startswith("noise="):
        text = text[len("noise="):]
    if text == "none":
        return Noise()
    kind, sep, eps = text.partition(":")
    if not sep:
        raise ValueError(f"bad noise clause {text!r}")
    return Noise(kind, float(eps))


@dataclass(frozen=True)
class BellSample:
    z: int
    w: int


def eval_many(monomials, xs: np.ndarray) -> np.ndarray:
    """Evaluate an F2 polynomial (given by monomial masks) at int-encoded points."""
    out = np.zeros(xs.shape, dtype=np.uint8)
    for m in monomials:
        out ^= ((xs & m) == m).astype(np.uint8)
    return out


def eval_many_q(f: ZqPoly, xs: np.ndarray) -> np.ndarray:
    out = np.zeros(xs.shape, dtype=np.int64)
    for m, c in f.coeffs.items():
        out += c * ((xs & m) == m)
    return out % f.q


def _parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    shift = 32
    while shift:
        v ^= v >> shift
        shift //= 2
    return (v & 1).astype(np.uint8)


def _uniform_ints(rng: np.random.Generator, nbits: int, size: int) -> np.ndarray:
    if nbits == 0:
        return np.zeros(size, dtype=np.int64)
    return rng.integers(0, 1 << nbits, size=size, dtype=np.int64)


def _povm_outcomes(c: np.ndarray, q: int, rng: np.random.Generator) -> np.ndarray:
    """Sample the q-outcome POVM {(2/q)|phi_b><phi_b|} on (|0> + w^c |1>)/sqrt2.

    Implemented as the equivalent mixture of projective measurements: pick
    b0 uniform in [0, q/2), measure in {phi_b0, Z phi_b0}.  Outcome b0 has
    probability sin^2(pi (c - b0) / q), exactly zero when b0 = c.
    """
    half = q // 2
    b0 = rng.integers(0, half, size=c.shape)
    p = np.sin(np.pi * ((c - b0) % q) / q) ** 2
    u = rng.random(size=c.shape)
    return np.where(u < p, b0, b0 + half)


class PhaseOracle:
    """Sampling handle around a hidden polynomial.

    kinds:
      ``binary``       F2Poly f, state sum_x (-1)^f(x) |x>
      ``generalized``  ZqPoly f, state sum_x w_q^f(x) |x>
      ``stabilizer``   ZqPoly f (q=4) on an affine support
      ``quadratic``    F2Poly of degree <= 2, for Bell sampling under noise

    One oracle is single-consumer: its RNG stream and counters mutate.
    """

    def __init__(
        self,
        kind: str,
        poly: Hidden,
        rng: np.random.Generator,
        noise: Noise | None = None,
        support: StabSupport | None = None,
    ) -> None:
        if kind not in ("binary", "generalized", "stabilizer", "quadratic"):
            raise ValueError(f"unknown oracle kind {kind!r}")
        if kind in ("binary", "quadratic") and not isinstance(poly, F2Poly):
            raise TypeError(f"{kind} oracle needs an F2Poly")
        if kind in ("generalized", "stabilizer") and not isinstance(poly, ZqPoly):
            raise TypeError(f"{kind} oracle needs a ZqPoly")
        if kind == "quadratic" and poly.degree > 2:
            raise ValueError("quadratic oracle needs degree <= 2")
        if kind == "stabilizer":
            if support is None:
                raise ValueError("stabilizer oracle needs a support")
            if support.n != poly.n:
                raise ValueError("support and polynomial dimensions differ")
        self.kind = kind
        self.n = poly.n
        self.noise = noise or Noise()
        self.rng = rng
        self.counters: dict[str, int] = {}
        self._poly = poly
        self._support = support
        self._deriv_cache: dict[int, Hidden] = {}

    # -- accounting -------------------------------------------------------

    @property
    def copies_used(self) -> int:
        return sum(self.counters.values())

    def _charge(self, primitive: str, copies: int) -> None:
        self.counters[primitive] = self.counters.get(primitive, 0) + copies

    def _require(self, *kinds: str) -> None:
        if self.kind not in kinds:
            raise OracleKindError(f"{self.kind} oracle does not support this primitive")

    def _require_clean(self, what: str) -> None:
        if not self.noise.clean:
            raise OracleKindError(f"{what} is only defined on noiseless copies")

    def _deriv(self, k: int) -> Hidden:
        g = self._deriv_cache.get(k)
        if g is None:
            g = derivative(self._poly, k) if isinstance(self._poly, F2Poly) else derivative_q(self._poly, k)
            self._deriv_cache[k] = g
        return g

    # -- separable primitives ---------------------------------------------

    def rpds(self, k: int, m: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Z on every qubit but k, X on qubit k: m pairs (y, D_k f(y))."""
        self._require("binary", "quadratic")
        self._require_clean("RPDS")
        g = self._deriv(k)
        y = _uniform_ints(self.rng, self.n - 1, m)
        self._charge("rpds", m)
        return y, eval_many(g.monomials, y)

    def povm_sample(self, k: int, m: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Z on every qubit but k, the q-outcome POVM on qubit k.

        Returns (y, b) with b != f(y^{k=1}) - f(y^{k=0}) mod q always.
        """
        self._require("generalized")
        self._require_clean("POVM sampling")
        f = self._poly
        if f.q % 2:
            raise ValueError("POVM sampling needs even q")
        g = self._deriv(k)
        y = _uniform_ints(self.rng, self.n - 1, m)
        self._charge("povm", m)
        return y, _povm_outcomes(eval_many_q(g, y), f.q, self.rng)

    def basis_sample(self, m: int = 1) -> np.ndarray:
        """Computational-basis measurement of a stabilizer state."""
        self._require("stabilizer")
        x = self._support_points(m)
        self._charge("basis", m)
        return x

    def _support_points(self, m: int) -> np.ndarray:
        sup = self._support
        u = _uniform_ints(self.rng, sup.dim, m)
        x = np.full(m, sup.a, dtype=np.int64)
        for i, v in enumerate(sup.basis):
            x ^= np.where((u >> i) & 1, v, 0)
        return x

    def frame_povm_sample(self, frame: StabSupport, k: int, m: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """POVM sampling along basis vector k (1-based) of a learner-chosen frame.

        The learner's frame is made physical by X on the bits of frame.a and a
        CNOT network sending each frame basis vector to its pivot qubit; the
        pivot qubit of vector k then gets the POVM, all others Z.  Returns
        (y, b) where y is the n-1 bit Z outcome with the pivot of k removed.
        """
        self._require("stabilizer")
        self._require_clean("POVM sampling")
        if frame.n != self.n or not 1 <= k <= frame.dim:
            raise ValueError("frame does not match the oracle")
        f, sup = self._poly, self._support
        v = frame.basis[k - 1]
        pk = frame.pivots[k - 1]
        x = self._support_points(m)
        self._charge("povm", m)

        pivots = frame.pivots
        w = x ^ frame.a
        spread = np.zeros_like(w)
        for p, vec in zip(pivots, frame.basis):
            spread ^= np.where((w >> p) & 1, vec ^ (1 << p), 0)
        w = w ^ spread
        partner = x ^ v
        inside = np.array([sup.contains(int(t)) for t in partner], dtype=bool)
        lo = np.where((w >> pk) & 1, partner, x)
        hi = np.where((w >> pk) & 1, x, partner)
        c = (eval_many_q(f, hi) - eval_many_q(f, lo)) % f.q
        b = _povm_outcomes(c, f.q, self.rng)
        b = np.where(inside, b, self.rng.integers(0, f.q, size=m))
        low = w & ((1 << pk) - 1)
        high = (w >> (pk + 1)) << pk
        return low | high, b

    # -- entangled / noisy primitives -------------------------------------

    def _bell_matrix_rows(self) -> list[int]:
        """Rows of B = A + A^T (zero diagonal) for the hidden quadratic form."""
        rows = [0] * self.n
        for mono in self._poly.monomials:
            if popcount(mono) == 2:
                i = (mono & -mono).bit_length() - 1
                j = mono.bit_length() - 1
                rows[i] |= 1 << j
                rows[j] |= 1 << i
        return rows

    def _clean_bell(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        self._require("binary", "quadratic")
        if self._poly.degree > 2:
            raise OracleKindError("Bell sampling needs a degree <= 2 phase")
        z = _uniform_ints(self.rng, self.n, m)
        w = np.zeros(m, dtype=np.int64)
        for i, row in enumerate(self._bell_matrix_rows()):
            w |= _parity(z & row).astype(np.int64) << i
        self._charge("bell", 2 * m)
        return z, w

    def bell_sample(self, m: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Bell sampling on two copies under global (or no) depolarizing noise."""
        if self.noise.kind == "local":
            raise OracleKindError("use bell_sample_local for local noise")
        z, w = self._clean_bell(m)
        keep = 1.0 - (1.0 - self.noise.eps) ** 2
        noisy = self.rng.random(m) < keep
        w = np.where(noisy, _uniform_ints(self.rng, self.n, m), w)
        return z, w

    def bell_sample_local(self, m: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Bell sampling under local noise: each of the 2n bits is scrambled independently."""
        if self.noise.kind == "global":
            raise OracleKindError("use bell_sample for global noise")
        z, w = self._clean_bell(m)
        flip = 1.0 - (1.0 - self.noise.eps) ** 2
        z = self._scramble_bits(z, flip)
        w = self._scramble_bits(w, flip)
        return z, w

    def _scramble_bits(self, v: np.ndarray, rate: float) -> np.ndarray:
        if rate == 0.0:
            return v
        hit = np.zeros_like(v)
        for i in range(self.n):
            hit |= (self.rng.random(v.shape) < rate).astype(np.int64) << i
        fresh = _uniform_ints(self.rng, self.n, v.shape[0])
        return (v & ~hit) | (fresh & hit)

    def bv_sample(self, m: int = 1) -> np.ndarray:
        """Bernstein-Vazirani on one copy of a linear phase state.

        Global noise replaces the whole outcome with a uniform string with
        probability eps; local noise scrambles each bit with probability eps.
        """
        self._require("binary", "quadratic")
        if self._poly.degree > 1:
            raise OracleKindError("Bernstein-Vazirani needs a linear residual phase")
        lin = 0
        for mono in self._poly.monomials:
            lin |= mono
        out = np.full(m, lin, dtype=np.int64)
        if self.noise.kind == "global" and self.noise.eps:
            noisy = self.rng.random(m) < self.noise.eps
            out = np.where(noisy, _uniform_ints(self.rng, self.n, m), out)
        elif self.noise.kind == "local":
            out = self._scramble_bits(out, self.noise.eps)
        self._charge("bv", m)
        return out

    def apply_correction(self, g: F2Poly) -> "PhaseOracle":
        """Oracle for the state with the diagonal (-1)^g(x) applied to every copy.

        The returned oracle shares this one's RNG stream and counters.
        """
        self._require("binary", "quadratic")
        if g.n != self.n:
            raise ValueError(f"dimension mismatch: {g.n} vs {self.n}")
        out = PhaseOracle.__new__(PhaseOracle)
        out.kind = self.kind
        out.n = self.n
        out.noise = self.noise
        out.rng = self.rng
        out.counters = self.counters
        out._poly = self._poly + g
        out._support = None
        out._deriv_cache = {}
        return out


def reveal(o: PhaseOracle) -> tuple[Hidden, StabSupport | None]:
    """Test-only access to the hidden polynomial and support."""
    return o._poly, o._support
