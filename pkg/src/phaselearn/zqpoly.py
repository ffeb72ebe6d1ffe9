"""Polynomials {0,1}^n -> Z_q with even modulus q, same int encoding as f2poly."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from phaselearn.f2poly import (
    F2Poly,
    drop_index,
    indices_to_mask,
    mask_to_indices,
    monomial_order,
    parse_header,
    popcount,
)

__all__ = [
    "ZqPoly",
    "derivative_q",
    "equivalent",
    "nonconstant_miss_fraction",
    "embed_binary",
    "random_zq_poly",
    "from_values",
    "format_zq",
    "parse_zq",
    "random_stabilizer_phase",
    "is_stabilizer_phase",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 22


@dataclass(frozen=True)
class ZqPoly:
    """``sum_J c_J prod_{j in J} x_j mod q``; only nonzero coefficients are stored."""

    n: int
    q: int
    coeffs: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.q < 2 or self.q % 2:
            raise ValueError(f"modulus must be even, got {self.q}")
        limit = 1 << self.n
        clean = {}
        for m, c in dict(self.coeffs).items():
            if m < 0 or m >= limit:
                raise ValueError(f"monomial {mask_to_indices(m)} outside [{self.n}]")
            c %= self.q
            if c:
                clean[m] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __hash__(self) -> int:
        return hash((self.n, self.q, tuple(self.coeffs.items())))

    @classmethod
    def from_terms(cls, n: int, q: int, terms: Iterable[tuple[int, Iterable[int]]]) -> "ZqPoly":
        acc: dict[int, int] = {}
        for c, idx in terms:
            m = indices_to_mask(idx)
            acc[m] = (acc.get(m, 0) + c) % q
        return cls(n, q, acc)

    @property
    def degree(self) -> int:
        return max((popcount(m) for m in self.coeffs), default=0)

    @property
    def constant(self) -> int:
        return self.coeffs.get(0, 0)

    def __call__(self, x: int) -> int:
        return self.eval(x)

    def eval(self, x: int) -> int:
        if x < 0 or x >> self.n:
            raise ValueError(f"point has more than n={self.n} bits")
        acc = 0
        for m, c in self.coeffs.items():
            if m & x == m:
                acc += c
        return acc % self.q

    def values(self) -> np.ndarray:
        """Values at all 2^n points, indexed by the int encoding of x."""
        if self.n > ENUMERATION_CAP:
            raise ValueError(f"n={self.n} above enumeration cap {ENUMERATION_CAP}")
        xs = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros(1 << self.n, dtype=np.int64)
        for m, c in self.coeffs.items():
            out += c * ((xs & m) == m)
        return out % self.q

    def __add__(self, other: "ZqPoly") -> "ZqPoly":
        self._check_compatible(other)
        acc = dict(self.coeffs)
        for m, c in other.coeffs.items():
            acc[m] = acc.get(m, 0) + c
        return ZqPoly(self.n, self.q, acc)

    def __neg__(self) -> "ZqPoly":
        return ZqPoly(self.n, self.q, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "ZqPoly") -> "ZqPoly":
        return self + (-other)

    def shift(self, c: int) -> "ZqPoly":
        """Add the constant c."""
        acc = dict(self.coeffs)
        acc[0] = acc.get(0, 0) + c
        return ZqPoly(self.n, self.q, acc)

    def drop_constant(self) -> "ZqPoly":
        return ZqPoly(self.n, self.q, {m: c for m, c in self.coeffs.items() if m})

    def _check_compatible(self, other: "ZqPoly") -> None:
        if (self.n, self.q) != (other.n, other.q):
            raise ValueError(f"mismatch: (n={self.n}, q={self.q}) vs (n={other.n}, q={other.q})")

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"ZqPoly(n={self.n}, q={self.q}, 0)"
        parts = []
        for m, c in self.coeffs.items():
            mono = "*".join(f"x{i}" for i in mask_to_indices(m))
            parts.append(f"{c}" if not mono else f"{c}*{mono}")
        return f"ZqPoly(n={self.n}, q={self.q}, {' + '.join(parts)})"


def derivative_q(f: ZqPoly, k: int) -> ZqPoly:
    """``g(y) = f(y^{k=1}) - f(y^{k=0}) mod q`` with indices above k shifted down."""
    if not 1 <= k <= f.n:
        raise IndexError(f"derivative index {k} outside 1..{f.n}")
    bit = 1 << (k - 1)
    acc: dict[int, int] = {}
    for m, c in f.coeffs.items():
        if m & bit:
            s = drop_index(m, k)
            acc[s] = acc.get(s, 0) + c
    return ZqPoly(f.n - 1, f.q, acc)


def equivalent(f: ZqPoly, g: ZqPoly) -> bool:
    """True iff f - g is constant on {0,1}^n.

    Distinct multilinear representations give distinct functions, so this is
    a structural check on the non-constant coefficients.
    """
    f._check_compatible(g)
    return f.drop_constant() == g.drop_constant()


def nonconstant_miss_fraction(f: ZqPoly, c: int) -> Fraction:
    """Exact fraction of x in {0,1}^n with f(x) != c."""
    vals = f.values()
    return Fraction(int(np.count_nonzero(vals != c % f.q)), 1 << f.n)


def embed_binary(f: F2Poly, q: int) -> ZqPoly:
    """The polynomial (q/2) * f over Z_q, whose phase state equals f's binary one."""
    if q % 2:
        raise ValueError("q must be even")
    r = q // 2
    return ZqPoly(f.n, q, {m: r for m in f.monomials})


def random_zq_poly(n: int, d: int, q: int, rng: np.random.Generator, constant: bool = False) -> ZqPoly:
    """Uniform coefficients in Z_q on every monomial of size <= d."""
    cols = monomial_order(n, d)
    if not constant:
        cols = cols[1:]
    vals = rng.integers(0, q, size=len(cols))
    return ZqPoly(n, q, {m: int(v) for m, v in zip(cols, vals)})


def random_stabilizer_phase(n: int, rng: np.random.Generator) -> ZqPoly:
    """i^(l(x)) (-1)^(q(x)): linear coefficients uniform in Z_4, quadratic ones in {0, 2}."""
    lin = rng.integers(0, 4, size=n)
    coeffs = {1 << i: int(c) for i, c in enumerate(lin)}
    for i in range(n):
        for j in range(i + 1, n):
            coeffs[(1 << i) | (1 << j)] = 2 * int(rng.integers(0, 2))
    return ZqPoly(n, 4, coeffs)


def is_stabilizer_phase(f: ZqPoly) -> bool:
    return f.q == 4 and f.degree <= 2 and all(c % 2 == 0 for m, c in f.coeffs.items() if popcount(m) == 2)


def from_values(n: int, q: int, known: Mapping[int, int], max_degree: int) -> ZqPoly:
    """Mobius inversion: coefficients of the degree<=max_degree polynomial with the given values.

    ``known`` must contain every point of Hamming weight <= max_degree.
    """
    acc = {}
    for m in monomial_order(n, max_degree):
        total = 0
        sub = m
        w = popcount(m)
        while True:
            sign = -1 if (w - popcount(sub)) % 2 else 1
            total += sign * known[sub]
            if sub == 0:
                break
            sub = (sub - 1) & m
        acc[m] = total
    return ZqPoly(n, q, acc)


def format_zq(f: ZqPoly) -> str:
    lines = [f"n={f.n} d={f.degree} q={f.q}"]
    order = sorted(f.coeffs, key=lambda m: (popcount(m), mask_to_indices(m)))
    for m in order:
        lines.append(f"{f.coeffs[m]}:" + " ".join(str(i) for i in mask_to_indices(m)))
    return "\n".join(lines) + "\n"


def parse_zq(text: str) -> ZqPoly:
    lines = [ln for ln in text.split("\n")]
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("empty polynomial text")
    header = parse_header(lines[0])
    n, q = int(header["n"]), int(header["q"])
    terms = []
    for lineno, line in enumerate(lines[1:], start=2):
        coeff, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected coeff:indices")
        idx = tuple(int(tok) for tok in rest.split())
        if any(not 1 <= i <= n for i in idx):
            raise ValueError(f"line {lineno}: index out of range 1..{n}")
        terms.append((int(coeff), idx))
    f = ZqPoly.from_terms(n, q, terms)
    if "d" in header and f.degree > int(header["d"]):
        raise ValueError(f"degree {f.degree} exceeds header d={header['d']}")
    return f
