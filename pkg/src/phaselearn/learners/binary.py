"""Separable-measurement learners for binary phase states."""

from __future__ import annotations

from phaselearn.f2poly import F2Poly, derivative, eval_matrix, insert_index, stitch
from phaselearn.f2solve import (
    DEFAULT_NODE_BUDGET,
    BudgetExceeded,
    gauss_solve,
    min_weight_solution,
    solutions_up_to_weight,
)
from phaselearn.oracle import OracleKindError, PhaseOracle
from phaselearn.learners.report import LearnReport, accounting, pack_bits


def _check_binary(o: PhaseOracle, n: int, d: int) -> None:
    if o.kind not in ("binary", "quadratic"):
        raise OracleKindError(f"binary learner got a {o.kind} oracle")
    if o.n != n:
        raise ValueError(f"oracle has {o.n} qubits, learner asked for {n}")
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")


def learn_binary(o: PhaseOracle, n: int, d: int, m_per_round: int) -> LearnReport:
    """Learn f in P(n, d) from RPDS samples, one linear system per direction.

    Round t draws m_per_round pairs (y, D_t f(y)), solves for the
    coefficients of D_t f over the degree-(d-1) monomials in n-1 variables,
    and the n derivatives are stitched back into f.
    """
    _check_binary(o, n, d)
    report = LearnReport(None)
    derivs = []
    with accounting(o, report):
        for t in range(1, n + 1):
            y, b = o.rpds(t, m_per_round)
            A = eval_matrix(y, n - 1, d - 1)
            sol = gauss_solve(A, pack_bits(b))
            nullity = len(sol.null_basis)
            report.per_round.append({"round": t, "rank": len(A.cols) - nullity, "cols": len(A.cols)})
            if not sol.unique:
                report.status = "ambiguous" if sol.status == "ambiguous" else "inconsistent"
                return report
            derivs.append(A.poly_from_vector(sol.solution))
        report.result = stitch(derivs)
    return report


def learn_sparse(
    o: PhaseOracle,
    n: int,
    d: int,
    s: int,
    m_per_round: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    decoder: str = "round",
) -> LearnReport:
    """Learn an s-sparse f in P(n, d) from RPDS samples.

    ``decoder="round"`` takes each round's unique minimum-weight solution and
    stitches.  ``decoder="joint"`` lists every solution of weight <= s in
    each round and keeps the single s-sparse f whose derivatives are in
    every list; it uses the same samples.
    """
    _check_binary(o, n, d)
    report = LearnReport(None)
    if s == 0:
        report.result = F2Poly.zero(n)
        return report
    if decoder == "joint":
        with accounting(o, report):
            report.result = _joint_sparse(o, n, d, s, m_per_round, node_budget, report)
        return report
    if decoder != "round":
        raise ValueError(f"unknown decoder {decoder!r}")
    derivs = []
    with accounting(o, report):
        for t in range(1, n + 1):
            y, b = o.rpds(t, m_per_round)
            A = eval_matrix(y, n - 1, d - 1)
            out = min_weight_solution(A, pack_bits(b), s, node_budget)
            report.per_round.append({"round": t, "status": out.status, "weight": out.weight, "nodes": out.nodes})
            if out.status != "ok":
                report.status = out.status
                return report
            derivs.append(A.poly_from_vector(out.solution))
        f = stitch(derivs)
        if f.sparsity > s:
            report.status = "infeasible"
            return report
        if any(derivative(f, t) != g for t, g in enumerate(derivs, start=1)):
            report.status = "inconsistent"
            return report
        report.result = f
    return report


def _joint_sparse(
    o: PhaseOracle, n: int, d: int, s: int, m_per_round: int, limit: int, report: LearnReport
) -> F2Poly | None:
    # Each candidate is stored as the set of monomials J (over n vars, t in J) it asserts.
    lists: list[list[frozenset[int]]] = []
    for t in range(1, n + 1):
        y, b = o.rpds(t, m_per_round)
        A = eval_matrix(y, n - 1, d - 1)
        try:
            sols = solutions_up_to_weight(A, pack_bits(b), s, limit)
        except BudgetExceeded:
            report.per_round.append({"round": t, "status": "budget"})
            report.status = "budget"
            return None
        report.per_round.append({"round": t, "candidates": len(sols)})
        cands = []
        for beta in sols:
            ms = A.poly_from_vector(beta).monomials
            cands.append(frozenset(insert_index(m, t, 1) for m in ms))
        lists.append(cands)

    order = sorted(range(n), key=lambda i: len(lists[i]))
    bits = [1 << i for i in range(n)]
    found: list[frozenset[int]] = []

    def agrees(i: int, ci: frozenset[int], j: int, cj: frozenset[int]) -> bool:
        return {m for m in ci if m & bits[j]} == {m for m in cj if m & bits[i]}

    def search(depth: int, chosen: list[tuple[int, frozenset[int]]], union: frozenset[int]) -> None:
        if len(found) > 1:
            return
        if depth == n:
            found.append(union)
            return
        i = order[depth]
        for c in lists[i]:
            u = union | c
            if len(u) > s:
                continue
            if all(agrees(i, c, j, cj) for j, cj in chosen):
                chosen.append((i, c))
                search(depth + 1, chosen, u)
                chosen.pop()

    search(0, [], frozenset())
    if len(found) != 1:
        report.status = "ambiguous" if found else "infeasible"
        return None
    return F2Poly(n, found[0])
