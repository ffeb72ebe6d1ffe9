"""Diagonal dyadic-phase circuits and their phase polynomials.

A gate (T, a) multiplies the amplitude of every basis state with x_j = 1
for all j in T by exp(i pi a / 2^(d-1)) = w_q^a, q = 2^d.  Text format::

    n=3 d=3
    H all
    CCZ 1 2 3
    CPHASE 1 2 : 1 / 4
    H all

``Z``, ``CZ`` and ``CCZ`` carry numerator 2^(d-1).  An ``H all`` line is
only allowed as a matching first/last pair.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from phaselearn.f2poly import F2Poly, mask_to_indices, monomial_order, popcount
from phaselearn.zqpoly import ZqPoly, embed_binary, equivalent

NAMED = {"Z": 1, "CZ": 2, "CCZ": 3}


class CircuitError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class Gate:
    targets: tuple[int, ...]
    numerator: int

    @property
    def mask(self) -> int:
        return sum(1 << (t - 1) for t in self.targets)


@dataclass
class Circuit:
    n: int
    d: int
    gates: list[Gate] = field(default_factory=list)
    hadamard_frame: bool = False
    global_phase: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 1:
            raise CircuitError("need n >= 1 and d >= 1")
        for g in self.gates:
            _validate_gate(g, self.n, self.d)

    @property
    def q(self) -> int:
        return 1 << self.d

    @property
    def is_binary(self) -> bool:
        half = 1 << (self.d - 1)
        return all(g.numerator % half == 0 for g in self.gates)

    def phases(self) -> np.ndarray:
        """Diagonal of the circuit as a product of per-gate phases (no frame)."""
        x = np.arange(1 << self.n)
        out = np.ones(1 << self.n, dtype=complex)
        for g in self.gates:
            hit = (x & g.mask) == g.mask
            out[hit] *= np.exp(1j * np.pi * g.numerator / (1 << (self.d - 1)))
        return out


def _validate_gate(g: Gate, n: int, d: int, line: int | None = None) -> None:
    if not g.targets:
        raise CircuitError("gate needs at least one target", line)
    if len(set(g.targets)) != len(g.targets):
        raise CircuitError(f"duplicate target in {list(g.targets)}", line)
    bad = [t for t in g.targets if not 1 <= t <= n]
    if bad:
        raise CircuitError(f"target {bad[0]} out of range 1..{n}", line)
    if len(g.targets) > d:
        raise CircuitError(f"{len(g.targets)} targets exceed level d={d}", line)
    if not 0 <= g.numerator < (1 << d):
        raise CircuitError(f"numerator {g.numerator} outside [0, {1 << d})", line)


_CPHASE = re.compile(r"^CPHASE((?:\s+\S+)*)\s*:\s*(\S+)\s*/\s*(\S+)$")


def _ints(tokens: list[str], line: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError as exc:
        raise CircuitError(f"bad target list {' '.join(tokens)!r}", line) from exc


def _denominator(text: str, line: int) -> int:
    m = re.fullmatch(r"2\^\(?(\d+)\)?", text)
    if m:
        return 1 << int(m.group(1))
    try:
        return int(text)
    except ValueError as exc:
        raise CircuitError(f"bad denominator {text!r}", line) from exc


def parse(text: str) -> Circuit:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            rows.append((lineno, body))
    if not rows:
        raise CircuitError("empty circuit text")
    lineno, header = rows[0]
    fields = dict(tok.split("=", 1) for tok in header.split() if "=" in tok)
    if "n" not in fields or "d" not in fields:
        raise CircuitError("header must read 'n=<n> d=<d>'", lineno)
    try:
        n, d = int(fields["n"]), int(fields["d"])
    except ValueError as exc:
        raise CircuitError("header values must be integers", lineno) from exc
    if n < 1 or d < 1:
        raise CircuitError("need n >= 1 and d >= 1", lineno)
    half = 1 << (d - 1)

    body = rows[1:]
    h_lines = [i for i, (_, t) in enumerate(body) if t.split()[0] == "H"]
    frame = False
    if h_lines:
        for i in h_lines:
            if body[i][1].split() != ["H", "all"]:
                raise CircuitError("only 'H all' is allowed among non-diagonal gates", body[i][0])
        if h_lines != [0, len(body) - 1] or len(body) < 2:
            raise CircuitError("'H all' must appear exactly as the first and last gate", body[h_lines[0]][0])
        frame = True
        body = body[1:-1]

    gates = []
    gphase = 0
    for lineno, line in body:
        name, *rest = line.split()
        if name in NAMED:
            targets = _ints(rest, lineno)
            if len(targets) != NAMED[name]:
                raise CircuitError(f"{name} takes {NAMED[name]} target(s), got {len(targets)}", lineno)
            gate = Gate(targets, half)
        elif name == "CPHASE":
            m = _CPHASE.match(line)
            if not m:
                raise CircuitError("expected 'CPHASE t1 .. tk : a / 2^(d-1)'", lineno)
            targets = _ints(m.group(1).split(), lineno)
            try:
                a = int(m.group(2))
            except ValueError as exc:
                raise CircuitError(f"bad numerator {m.group(2)!r}", lineno) from exc
            if _denominator(m.group(3), lineno) != half:
                raise CircuitError(f"denominator must be 2^(d-1) = {half}", lineno)
            if not targets:
                if not 0 <= a < (1 << d):
                    raise CircuitError(f"numerator {a} outside [0, {1 << d})", lineno)
                gphase = (gphase + a) % (1 << d)
                continue
            gate = Gate(targets, a)
        else:
            raise CircuitError(f"unknown or non-diagonal gate {name!r}", lineno)
        _validate_gate(gate, n, d, lineno)
        gates.append(Gate(tuple(gate.targets), gate.numerator))
    return Circuit(n, d, gates, frame, gphase)


def format_circuit(c: Circuit) -> str:
    half = 1 << (c.d - 1)
    out = [f"n={c.n} d={c.d}"]
    if c.global_phase:
        out.append(f"# global phase {c.global_phase} / {half} dropped")
    if c.hadamard_frame:
        out.append("H all")
    for g in c.gates:
        ts = " ".join(str(t) for t in g.targets)
        if g.numerator == half and len(g.targets) in NAMED.values():
            name = {v: k for k, v in NAMED.items()}[len(g.targets)]
            out.append(f"{name} {ts}")
        else:
            out.append(f"CPHASE {ts} : {g.numerator} / {half}")
    if c.hadamard_frame:
        out.append("H all")
    return "\n".join(out) + "\n"


def phase_polynomial(c: Circuit) -> ZqPoly:
    """Coefficients c_T = sum of numerators of gates on T, mod 2^d."""
    acc: dict[int, int] = {}
    for g in c.gates:
        acc[g.mask] = acc.get(g.mask, 0) + g.numerator
    return ZqPoly(c.n, c.q, acc)


def binary_view(f: ZqPoly) -> F2Poly | None:
    """The F2 polynomial whose binary phase state equals f's, if every coefficient is q/2 or 0."""
    half = f.q // 2
    if any(c != half for m, c in f.coeffs.items() if m):
        return None
    return F2Poly(f.n, frozenset(m for m in f.coeffs if m))


def in_hierarchy(f: ZqPoly, d: int) -> bool:
    """Whether every nonconstant coefficient c_T is divisible by 2^(|T|-1), |T| <= d."""
    if f.q != 1 << d:
        return False
    return all(m == 0 or (popcount(m) <= d and c % (1 << (popcount(m) - 1)) == 0) for m, c in f.coeffs.items())


def synthesize(f: ZqPoly | F2Poly, d: int, hadamard_frame: bool = False) -> Circuit:
    """One gate per nonzero coefficient, in graded order."""
    if isinstance(f, F2Poly):
        f = embed_binary(f, 1 << d)
    if f.q != 1 << d:
        raise CircuitError(f"modulus {f.q} does not match level d={d}")
    for m, c in f.coeffs.items():
        if m and (popcount(m) > d or c % (1 << (popcount(m) - 1))):
            raise CircuitError(
                f"coefficient {c} on {list(mask_to_indices(m))} is not a multiple of 2^{popcount(m) - 1}"
            )
    gates = [Gate(mask_to_indices(m), f.coeffs[m]) for m in monomial_order(f.n, d) if m and m in f.coeffs]
    return Circuit(f.n, d, gates, hadamard_frame, f.constant)


def circuits_equivalent(a: Circuit, b: Circuit) -> bool:
    return a.n == b.n and a.d == b.d and equivalent(phase_polynomial(a), phase_polynomial(b))


class ReconstructionFailed(RuntimeError):
    def __init__(self, report) -> None:
        super().__init__(f"learner failed with status {report.status!r}")
        self.report = report


def reconstruct(o, n: int, d: int, m_per_round: int, hadamard_frame: bool = False) -> Circuit:
    """Learn the phase polynomial behind a sealed oracle and emit it as a circuit.

    Binary oracles go through learn_binary, generalized ones through
    learn_generalized with q = 2^d.
    """
    from phaselearn.learners import learn_binary, learn_generalized

    if o.kind == "binary":
        report = learn_binary(o, n, d, m_per_round)
    else:
        report = learn_generalized(o, n, d, 1 << d, m_per_round)
    if not report.ok:
        raise ReconstructionFailed(report)
    try:
        return synthesize(report.result, d, hadamard_frame)
    except CircuitError:
        report.status = "outside-hierarchy"
        raise ReconstructionFailed(report) from None


def random_circuit(
    n: int,
    d: int,
    num_gates: int,
    rng: np.random.Generator,
    mode: str = "binary",
    max_targets: int | None = None,
) -> Circuit:
    """Random gates; ``mode`` is ``binary`` (C^kZ only), ``generators`` or ``any``.

    ``generators`` draws from Z^(1/2^(d-1)) and C^iZ^(1/2^j) with i + j = d - 1,
    i.e. a gate on |T| qubits with numerator 2^(|T|-1).
    """
    top = min(n, d if max_targets is None else max_targets)
    gates = []
    for _ in range(num_gates):
        k = int(rng.integers(1, top + 1))
        targets = tuple(sorted(int(t) + 1 for t in rng.choice(n, size=k, replace=False)))
        if mode == "binary":
            a = 1 << (d - 1)
        elif mode == "generators":
            a = 1 << (k - 1)
        elif mode == "any":
            a = int(rng.integers(0, 1 << d))
        else:
            raise ValueError(f"unknown mode {mode!r}")
        gates.append(Gate(targets, a))
    return Circuit(n, d, gates)


__all__ = [
    "Gate",
    "Circuit",
    "CircuitError",
    "ReconstructionFailed",
    "parse",
    "format_circuit",
    "phase_polynomial",
    "binary_view",
    "in_hierarchy",
    "synthesize",
    "reconstruct",
    "random_circuit",
    "circuits_equivalent",
]
