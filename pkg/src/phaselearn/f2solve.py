"""Linear algebra over F2 on int-packed rows.

A system has rows ``rows[k]`` (bit c = coefficient of unknown c) and a
right-hand side ``b`` whose bit k is the value of equation k.  Pivots are
always the lowest set column, so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from phaselearn.f2poly import EvalMatrix, popcount

__all__ = [
    "SolveOutcome",
    "MinWeightOutcome",
    "StabSupport",
    "Echelon",
    "echelonize",
    "gauss_solve",
    "min_weight_solution",
    "rank",
    "affine_basis",
    "random_affine_support",
    "BudgetExceeded",
    "solutions_up_to_weight",
    "DEFAULT_NODE_BUDGET",
]

DEFAULT_NODE_BUDGET = 10**7


def _lowbit(v: int) -> int:
    return (v & -v).bit_length() - 1


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "unique" | "ambiguous" | "inconsistent"
    solution: int | None = None
    null_basis: tuple[int, ...] = ()

    @property
    def unique(self) -> bool:
        return self.status == "unique"


@dataclass(frozen=True)
class MinWeightOutcome:
    status: str  # "ok" | "ambiguous" | "infeasible" | "budget"
    solution: int | None = None
    weight: int | None = None
    nodes: int = 0


@dataclass(frozen=True)
class StabSupport:
    """Affine subspace ``a + span(basis)`` of F2^n, basis in reduced echelon form."""

    n: int
    a: int
    basis: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        """0-based pivot bit of each basis vector."""
        return tuple(_lowbit(v) for v in self.basis)

    def contains(self, x: int) -> bool:
        r = x ^ self.a
        for v in self.basis:
            if (r >> _lowbit(v)) & 1:
                r ^= v
        return r == 0

    def point(self, u: int) -> int:
        """The point a + sum_i u_i basis[i]."""
        x = self.a
        i = 0
        while u:
            if u & 1:
                x ^= self.basis[i]
            u >>= 1
            i += 1
        return x

    def coords(self, x: int) -> int:
        """Coordinates u of x in this frame (valid only for members)."""
        r = x ^ self.a
        u = 0
        for i, p in enumerate(self.pivots):
            if (r >> p) & 1:
                u |= 1 << i
        return u

    def elements(self) -> set[int]:
        return {self.point(u) for u in range(1 << self.dim)}

    def same_set(self, other: "StabSupport") -> bool:
        """Equality as point sets; base points may differ."""
        return (
            self.n == other.n
            and set(self.basis) == set(other.basis)
            and other.contains(self.a)
        )


@dataclass(frozen=True)
class Echelon:
    """Reduced row echelon form of an augmented system."""

    ncols: int
    pivot_rows: dict[int, int]  # pivot column -> reduced row (rhs in bit ncols)
    consistent: bool

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def particular(self) -> int:
        x = 0
        rhs = 1 << self.ncols
        for c, row in self.pivot_rows.items():
            if row & rhs:
                x |= 1 << c
        return x

    def free_columns(self) -> list[int]:
        return [c for c in range(self.ncols) if c not in self.pivot_rows]

    def null_vector(self, f: int) -> int:
        v = 1 << f
        for c, row in self.pivot_rows.items():
            if (row >> f) & 1:
                v |= 1 << c
        return v


def echelonize(rows: Sequence[int], ncols: int, b: int = 0) -> Echelon:
    colmask = (1 << ncols) - 1
    rhs = 1 << ncols
    pivots: dict[int, int] = {}
    consistent = True
    for k, row in enumerate(rows):
        r = (int(row) & colmask) | (rhs if (b >> k) & 1 else 0)
        while r & colmask:
            c = (r & -r).bit_length() - 1
            p = pivots.get(c)
            if p is None:
                pivots[c] = r
                break
            r ^= p
        else:
            if r:
                consistent = False
    for c in sorted(pivots, reverse=True):
        pr = pivots[c]
        for c2 in pivots:
            if c2 < c and (pivots[c2] >> c) & 1:
                pivots[c2] ^= pr
    return Echelon(ncols, dict(sorted(pivots.items())), consistent)


def _unpack(A: EvalMatrix | tuple[Sequence[int], int]) -> tuple[Sequence[int], int]:
    if isinstance(A, EvalMatrix):
        return A.rows, len(A.cols)
    rows, ncols = A
    return [int(r) for r in rows], int(ncols)


def rank(A: EvalMatrix | tuple[Sequence[int], int]) -> int:
    rows, ncols = _unpack(A)
    return echelonize(rows, ncols).rank


def gauss_solve(A: EvalMatrix | tuple[Sequence[int], int], b: int) -> SolveOutcome:
    """Solve A beta = b over F2; b is an int whose bit k is the k-th rhs."""
    rows, ncols = _unpack(A)
    if b >> len(rows):
        raise ValueError("rhs has more bits than the matrix has rows")
    ech = echelonize(rows, ncols, b)
    if not ech.consistent:
        return SolveOutcome("inconsistent")
    x0 = ech.particular()
    free = ech.free_columns()
    if not free:
        return SolveOutcome("unique", x0)
    return SolveOutcome("ambiguous", x0, tuple(ech.null_vector(f) for f in free))


def min_weight_solution(
    A: EvalMatrix | tuple[Sequence[int], int],
    b: int,
    s_cap: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MinWeightOutcome:
    """Minimum Hamming weight beta with A beta = b and weight <= s_cap.

    The system is put in systematic form; every solution is then fixed by
    its restriction e to the free columns, and its weight is at least |e|.
    Free supports are enumerated by increasing size until the size exceeds
    the best weight found, which makes the search exhaustive at that weight.
    """
    if s_cap < 0:
        raise ValueError("s_cap must be non-negative")
    rows, ncols = _unpack(A)
    ech = echelonize(rows, ncols, b)
    if not ech.consistent:
        return MinWeightOutcome("infeasible")
    x0 = ech.particular()
    free = ech.free_columns()
    nulls = [ech.null_vector(f) for f in free]
    k = len(nulls)

    best = popcount(x0) if popcount(x0) <= s_cap else s_cap + 1
    found = {x0} if best == popcount(x0) else set()
    nodes = 1

    # DFS over free supports, depth-bounded by the best weight so far.
    stack: list[tuple[int, int, int]] = [(0, x0, 0)]  # (next free index, vector, depth)
    while stack:
        start, vec, depth = stack.pop()
        if depth + 1 > min(best, s_cap):
            continue
        for i in range(k - 1, start - 1, -1):
            nodes += 1
            if nodes > node_budget:
                return MinWeightOutcome("budget", nodes=nodes)
            v = vec ^ nulls[i]
            w = popcount(v)
            if w < best:
                best = w
                found = {v}
            elif w == best:
                found.add(v)
            if depth + 2 <= min(best, s_cap):
                stack.append((i + 1, v, depth + 1))

    if best > s_cap or not found:
        return MinWeightOutcome("infeasible", nodes=nodes)
    if len(found) > 1:
        return MinWeightOutcome("ambiguous", weight=best, nodes=nodes)
    (sol,) = found
    return MinWeightOutcome("ok", sol, best, nodes)


class BudgetExceeded(Exception):
    pass


def _subsets_by_syndrome(syn: Sequence[int], max_size: int) -> dict[int, list[int]]:
    table: dict[int, list[int]] = {}
    stack = [(0, 0, 0, 0)]  # (next column, support mask, syndrome, size)
    while stack:
        start, mask, s, size = stack.pop()
        table.setdefault(s, []).append(mask)
        if size == max_size:
            continue
        for c in range(start, len(syn)):
            stack.append((c + 1, mask | (1 << c), s ^ syn[c], size + 1))
    return table


def solutions_up_to_weight(
    A: EvalMatrix | tuple[Sequence[int], int],
    b: int,
    s_cap: int,
    limit: int = 10**5,
) -> list[int]:
    """Every beta with A beta = b and weight <= s_cap, sorted by (weight, value).

    Meet in the middle on column syndromes: supports of size <= ceil(s/2)
    are tabulated by syndrome and matched against supports of size
    <= floor(s/2).  Raises BudgetExceeded past ``limit`` solutions.
    """
    rows, ncols = _unpack(A)
    syn = [0] * ncols
    for k, row in enumerate(rows):
        r = row
        while r:
            c = _lowbit(r)
            syn[c] |= 1 << k
            r &= r - 1
    hi = (s_cap + 1) // 2
    table = _subsets_by_syndrome(syn, hi)
    found: set[int] = set()
    for target, lows in _subsets_by_syndrome(syn, s_cap - hi).items():
        for u in table.get(b ^ target, ()):
            for t in lows:
                v = u ^ t
                if popcount(v) <= s_cap:
                    found.add(v)
                    if len(found) > limit:
                        raise BudgetExceeded(f"more than {limit} solutions")
    return sorted(found, key=lambda v: (popcount(v), v))


def random_affine_support(n: int, k: int, rng: np.random.Generator) -> StabSupport:
    """Uniform k-dimensional affine subspace of F2^n, reduced to canonical form."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    a = int(rng.integers(0, 1 << n))
    vecs: list[int] = []
    while len(vecs) < k:
        v = int(rng.integers(1, 1 << n))
        if echelonize(vecs + [v], n).rank == len(vecs) + 1:
            vecs.append(v)
    return affine_basis([a] + [a ^ v for v in vecs], n)


def affine_basis(points: Sequence[int], n: int) -> StabSupport:
    """Smallest affine subspace through the points: a = first point, RREF basis."""
    if not points:
        raise ValueError("need at least one point")
    a = points[0]
    ech = echelonize([p ^ a for p in points[1:]], n)
    return StabSupport(n, a, tuple(ech.pivot_rows.values()))
