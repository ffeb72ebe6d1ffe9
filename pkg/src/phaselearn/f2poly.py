"""Multilinear polynomials over F2 in algebraic normal form.

Bit vectors and monomials are both encoded as Python ints: bit ``i - 1``
holds variable ``x_i``.  A monomial ``J`` is the int whose set bits are the
indices in ``J``; the empty monomial ``0`` is the constant term.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "F2Poly",
    "EvalMatrix",
    "bits",
    "bits_to_str",
    "monomial_order",
    "count_monomials",
    "drop_index",
    "insert_index",
    "derivative",
    "stitch",
    "eval_matrix",
    "random_poly",
    "random_sparse_poly",
    "parse_poly",
    "format_poly",
]


def bits(text: str) -> int:
    """Parse a left-to-right bit string ``x1 x2 ... xn`` into an int."""
    value = 0
    for i, ch in enumerate(text):
        if ch == "1":
            value |= 1 << i
        elif ch != "0":
            raise ValueError(f"not a bit string: {text!r}")
    return value


def bits_to_str(value: int, n: int) -> str:
    return "".join("1" if (value >> i) & 1 else "0" for i in range(n))


def popcount(value: int) -> int:
    return bin(value).count("1")


def mask_to_indices(mask: int) -> tuple[int, ...]:
    """1-based sorted indices of the set bits."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return tuple(out)


def indices_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


@lru_cache(maxsize=256)
def monomial_order(n: int, max_degree: int) -> tuple[int, ...]:
    """Canonical graded-lex list of monomials of size <= max_degree over n vars."""
    out = []
    for size in range(0, min(max_degree, n) + 1):
        for combo in itertools.combinations(range(n), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            out.append(mask)
    return tuple(out)


def count_monomials(n: int, max_degree: int) -> int:
    return sum(math.comb(n, j) for j in range(0, min(max_degree, n) + 1))


def drop_index(mask: int, k: int) -> int:
    """Remove variable k (1-based) from an (n)-var mask, shifting higher ones down."""
    low = mask & ((1 << (k - 1)) - 1)
    high = (mask >> k) << (k - 1)
    return low | high


def insert_index(mask: int, k: int, bit: int = 0) -> int:
    """Inverse of drop_index: open a slot at position k and fill it with bit."""
    low = mask & ((1 << (k - 1)) - 1)
    high = (mask >> (k - 1)) << k
    return low | high | (bit << (k - 1))


def _degree(monomials: Iterable[int]) -> int:
    return max((popcount(m) for m in monomials), default=0)


@dataclass(frozen=True)
class F2Poly:
    """Polynomial ``sum_J alpha_J prod_{j in J} x_j`` over F2.

    ``monomials`` holds exactly the J with ``alpha_J = 1``.  The constant
    term is the monomial ``0``.
    """

    n: int
    monomials: frozenset[int]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be non-negative")
        object.__setattr__(self, "monomials", frozenset(self.monomials))
        limit = 1 << self.n
        for m in self.monomials:
            if m < 0 or m >= limit:
                raise ValueError(f"monomial {mask_to_indices(m)} outside [{self.n}]")

    @classmethod
    def zero(cls, n: int) -> "F2Poly":
        return cls(n, frozenset())

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[Iterable[int]]) -> "F2Poly":
        """Build from 1-based index tuples; repeated terms cancel mod 2."""
        acc: set[int] = set()
        for term in terms:
            acc ^= {indices_to_mask(term)}
        return cls(n, frozenset(acc))

    @property
    def degree(self) -> int:
        return _degree(self.monomials)

    @property
    def sparsity(self) -> int:
        return sum(1 for m in self.monomials if m)

    @property
    def constant(self) -> int:
        return 1 if 0 in self.monomials else 0

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    def __call__(self, x: int) -> int:
        return self.eval(x)

    def eval(self, x: int) -> int:
        if x < 0 or x >> self.n:
            raise ValueError(f"point has more than n={self.n} bits")
        acc = 0
        for m in self.monomials:
            if m & x == m:
                acc ^= 1
        return acc

    def __add__(self, other: "F2Poly") -> "F2Poly":
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        return F2Poly(self.n, self.monomials ^ other.monomials)

    def drop_constant(self) -> "F2Poly":
        return F2Poly(self.n, self.monomials - {0})

    def equal_mod_constant(self, other: "F2Poly") -> bool:
        return self.n == other.n and (self.monomials ^ other.monomials) <= {0}

    def truth_table(self) -> np.ndarray:
        """Values on all 2^n points, indexed by the int encoding of x."""
        xs = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros(1 << self.n, dtype=np.uint8)
        for m in self.monomials:
            out ^= ((xs & m) == m).astype(np.uint8)
        return out

    def terms(self) -> list[tuple[int, ...]]:
        order = {m: i for i, m in enumerate(monomial_order(self.n, self.n))} if self.n <= 16 else None
        if order is not None:
            ms = sorted(self.monomials, key=order.__getitem__)
        else:
            ms = sorted(self.monomials, key=lambda m: (popcount(m), mask_to_indices(m)))
        return [mask_to_indices(m) for m in ms]

    def __repr__(self) -> str:
        if not self.monomials:
            return f"F2Poly(n={self.n}, 0)"
        body = " + ".join("1" if not t else "*".join(f"x{i}" for i in t) for t in self.terms())
        return f"F2Poly(n={self.n}, {body})"


def derivative(f: F2Poly, k: int) -> F2Poly:
    """Directional derivative ``y -> f(y^{k=1}) + f(y^{k=0})`` over n-1 variables.

    Variables with index above k shift down by one.
    """
    if not 1 <= k <= f.n:
        raise IndexError(f"derivative index {k} outside 1..{f.n}")
    bit = 1 << (k - 1)
    out = {drop_index(m, k) for m in f.monomials if m & bit}
    return F2Poly(f.n - 1, frozenset(out))


def stitch(derivs: Sequence[F2Poly]) -> F2Poly:
    """Rebuild f (with zero constant term) from its n directional derivatives.

    Each coefficient alpha_J is the majority over t in J of the coefficient of
    J minus t in derivs[t].  Ties resolve to 0.
    """
    n = len(derivs)
    for t, g in enumerate(derivs, start=1):
        if g.n != n - 1:
            raise ValueError(f"derivative {t} has {g.n} variables, expected {n - 1}")
    votes: dict[int, int] = {}
    for t, g in enumerate(derivs, start=1):
        for s in g.monomials:
            j = insert_index(s, t, 1)
            votes[j] = votes.get(j, 0) + 1
    out = {j for j, v in votes.items() if 2 * v > popcount(j)}
    return F2Poly(n, frozenset(out))


@dataclass(frozen=True)
class EvalMatrix:
    """Bit-packed evaluation matrix: row k holds the monomial values of point k.

    Bit c of ``rows[k]`` is the value of monomial ``cols[c]`` at ``points[k]``.
    """

    nvars: int
    cols: tuple[int, ...]
    rows: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def to_dense(self) -> np.ndarray:
        m, ncols = self.shape
        out = np.zeros((m, ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for c in range(ncols):
                out[i, c] = (r >> c) & 1
        return out

    def dump(self) -> str:
        """Plain-text bitmap, one row per line, columns left to right."""
        return "\n".join(
            "".join("1" if (r >> c) & 1 else "0" for c in range(len(self.cols))) for r in self.rows
        )

    def poly_from_vector(self, beta: int) -> F2Poly:
        ms = frozenset(self.cols[c] for c in range(len(self.cols)) if (beta >> c) & 1)
        return F2Poly(self.nvars, ms)

    def vector_from_poly(self, g: F2Poly) -> int:
        index = {m: c for c, m in enumerate(self.cols)}
        beta = 0
        for m in g.monomials:
            if m not in index:
                raise ValueError(f"monomial {mask_to_indices(m)} not among the columns")
            beta |= 1 << index[m]
        return beta


def _pack_rows(dense: np.ndarray) -> tuple[int, ...]:
    if dense.shape[1] == 0:
        return tuple(0 for _ in range(dense.shape[0]))
    packed = np.packbits(dense, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


def eval_matrix(points: Sequence[int], nvars: int, max_degree: int) -> EvalMatrix:
    """Evaluation matrix of ``points`` under all monomials of size <= max_degree."""
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    cols = monomial_order(nvars, max_degree)
    pts = np.asarray(points, dtype=np.int64).reshape(-1)
    if pts.size and (pts.min() < 0 or (pts >> nvars).any()):
        raise ValueError(f"point has more than {nvars} bits")
    colarr = np.asarray(cols, dtype=np.int64)
    dense = ((pts[:, None] & colarr[None, :]) == colarr[None, :]).astype(np.uint8)
    return EvalMatrix(nvars, cols, _pack_rows(dense))


def random_poly(n: int, d: int, rng: np.random.Generator) -> F2Poly:
    """Uniform element of P(n, d) with zero constant term."""
    if d > n:
        raise ValueError("degree exceeds variable count")
    cols = monomial_order(n, d)[1:]
    keep = rng.integers(0, 2, size=len(cols))
    return F2Poly(n, frozenset(m for m, k in zip(cols, keep) if k))


def random_sparse_poly(n: int, d: int, s: int, rng: np.random.Generator) -> F2Poly:
    """Uniformly random support of exactly s nonempty monomials of size <= d."""
    if d > n:
        raise ValueError("degree exceeds variable count")
    cols = monomial_order(n, d)[1:]
    if not 0 <= s <= len(cols):
        raise ValueError(f"cannot pick {s} monomials out of {len(cols)}")
    picks = rng.choice(len(cols), size=s, replace=False) if s else []
    return F2Poly(n, frozenset(cols[i] for i in picks))


def format_poly(f: F2Poly) -> str:
    lines = [f"n={f.n} d={f.degree}"]
    lines.extend(" ".join(str(i) for i in t) for t in f.terms())
    return "\n".join(lines) + "\n"


def parse_header(line: str) -> dict[str, str]:
    out = {}
    for tok in line.split():
        key, sep, value = tok.partition("=")
        if not sep:
            raise ValueError(f"bad header token {tok!r}")
        out[key] = value
    return out


def parse_poly(text: str) -> F2Poly:
    """Inverse of format_poly.  A blank line after the header is the constant 1."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("empty polynomial text")
    header = parse_header(lines[0])
    n = int(header["n"])
    d = int(header.get("d", n))
    terms = []
    for lineno, line in enumerate(lines[1:], start=2):
        idx = tuple(int(tok) for tok in line.split())
        if list(idx) != sorted(set(idx)):
            raise ValueError(f"line {lineno}: indices must be sorted and distinct")
        if any(not 1 <= i <= n for i in idx):
            raise ValueError(f"line {lineno}: index out of range 1..{n}")
        terms.append(idx)
    f = F2Poly.from_terms(n, terms)
    if f.degree > d:
        raise ValueError(f"degree {f.degree} exceeds header d={d}")
    return f
