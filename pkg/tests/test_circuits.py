import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phaselearn.circuits import (
    Circuit,
    CircuitError,
    Gate,
    ReconstructionFailed,
    binary_view,
    circuits_equivalent,
    format_circuit,
    in_hierarchy,
    parse,
    phase_polynomial,
    random_circuit,
    reconstruct,
    synthesize,
)
from phaselearn.f2poly import F2Poly
from phaselearn.oracle import PhaseOracle
from phaselearn.zqpoly import ZqPoly


def oracle_for(c: Circuit, rng):
    f = phase_polynomial(c)
    fb = binary_view(f)
    if c.is_binary and fb is not None:
        return PhaseOracle("binary", fb, rng)
    return PhaseOracle("generalized", f, rng)


class TestParse:
    def test_frame_example(self):
        c = parse("n=3 d=3\nH all\nCCZ 1 2 3\nZ 2\nH all\n")
        assert c.hadamard_frame and c.gates == [Gate((1, 2, 3), 4), Gate((2,), 4)]

    def test_cphase(self):
        c = parse("n=3 d=3\nCPHASE 1 2 : 1 / 4\n")
        assert c.gates == [Gate((1, 2), 1)]
        assert parse("n=3 d=3\nCPHASE 1 2 : 1 / 2^(2)\n").gates == c.gates

    def test_comments_and_blank(self):
        c = parse("# hi\nn=2 d=2\n\nCZ 1 2  # entangler\n")
        assert c.gates == [Gate((1, 2), 2)]

    def test_global_phase_recorded(self):
        c = parse("n=2 d=2\nCPHASE : 1 / 2\nZ 1\n")
        assert c.global_phase == 1 and c.gates == [Gate((1,), 2)]

    @pytest.mark.parametrize(
        "text, line",
        [
            ("n=3 d=2\nCZ 1 1\n", 2),
            ("n=3 d=2\nZ 4\n", 2),
            ("n=3 d=2\nCCZ 1 2 3\n", 2),
            ("n=3 d=2\nX 1\n", 2),
            ("n=3 d=2\nZ 1\nH all\n", 3),
            ("n=3 d=2\nCPHASE 1 : 9 / 2\n", 2),
            ("n=3 d=2\nCPHASE 1 : 1 / 8\n", 2),
        ],
    )
    def test_errors_carry_line(self, text, line):
        with pytest.raises(CircuitError) as info:
            parse(text)
        assert info.value.line == line

    def test_bad_header(self):
        with pytest.raises(CircuitError):
            parse("CZ 1 2\n")
        with pytest.raises(CircuitError):
            parse("")

    def test_format_roundtrip(self):
        rng = np.random.default_rng(0)
        for mode in ("binary", "generators", "any"):
            for _ in range(20):
                c = random_circuit(5, 3, 10, rng, mode)
                c.hadamard_frame = bool(rng.integers(0, 2))
                back = parse(format_circuit(c))
                assert back.gates == c.gates and back.hadamard_frame == c.hadamard_frame


class TestPhasePolynomial:
    def test_cz(self):
        f = phase_polynomial(parse("n=2 d=2\nCZ 1 2\n"))
        assert dict(f.coeffs) == {0b11: 2}
        assert binary_view(f) == F2Poly.from_terms(2, [(1, 2)])

    def test_double_ccz_cancels(self):
        f = phase_polynomial(parse("n=3 d=3\nCCZ 1 2 3\nCCZ 1 2 3\n"))
        assert not f.coeffs and binary_view(f).is_zero

    def test_matches_gate_product(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            c = random_circuit(6, 3, 20, rng, "any")
            f = phase_polynomial(c)
            want = np.exp(2j * np.pi * f.values() / f.q)
            assert np.allclose(c.phases(), want)

    def test_order_invariant(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            c = random_circuit(6, 3, 15, rng, "any")
            perm = [c.gates[i] for i in rng.permutation(len(c.gates))]
            assert phase_polynomial(Circuit(6, 3, perm)) == phase_polynomial(c)

    def test_generators_stay_in_hierarchy(self):
        rng = np.random.default_rng(3)
        for d in (2, 3, 4):
            for _ in range(30):
                c = random_circuit(6, d, 25, rng, "generators")
                assert in_hierarchy(phase_polynomial(c), d)


class TestSynthesize:
    def test_zero(self):
        assert synthesize(ZqPoly(4, 4), 2).gates == []

    def test_single_cz(self):
        c = synthesize(ZqPoly.from_terms(3, 4, [(2, (1, 2))]), 2)
        assert c.gates == [Gate((1, 2), 2)]
        assert format_circuit(c) == "n=3 d=2\nCZ 1 2\n"

    def test_rejects_outside_set(self):
        with pytest.raises(CircuitError):
            synthesize(ZqPoly.from_terms(3, 4, [(1, (1, 2))]), 2)
        with pytest.raises(CircuitError):
            synthesize(ZqPoly(3, 8), 2)

    def test_binary_input(self):
        c = synthesize(F2Poly.from_terms(3, [(1, 2, 3), (2,)]), 3)
        assert c.gates == [Gate((2,), 4), Gate((1, 2, 3), 4)]

    @settings(max_examples=60)
    @given(st.integers(2, 6), st.integers(1, 3), st.data())
    def test_roundtrip(self, n, d, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        c = random_circuit(n, d, data.draw(st.integers(0, 20)), rng, "generators")
        f = phase_polynomial(c)
        assert phase_polynomial(synthesize(f, d)) == f
        assert circuits_equivalent(synthesize(f, d), c)


class TestReconstruct:
    def test_single_cz(self):
        c = parse("n=4 d=2\nCZ 2 3\n")
        out = reconstruct(oracle_for(c, np.random.default_rng(0)), 4, 2, 64)
        assert out.gates == [Gate((2, 3), 2)]

    def test_iqp_binary(self):
        rng = np.random.default_rng(4)
        wins = 0
        for _ in range(20):
            c = random_circuit(6, 3, 15, rng, "binary")
            c.hadamard_frame = True
            try:
                out = reconstruct(oracle_for(c, rng), 6, 3, 128, hadamard_frame=True)
            except ReconstructionFailed:
                continue
            wins += circuits_equivalent(out, c) and out.hadamard_frame
        assert wins >= 19

    def test_dyadic_d2(self):
        rng = np.random.default_rng(5)
        wins = 0
        for _ in range(20):
            c = random_circuit(4, 2, 8, rng, "generators")
            try:
                out = reconstruct(oracle_for(c, rng), 4, 2, 128)
            except ReconstructionFailed:
                continue
            wins += circuits_equivalent(out, c)
        assert wins >= 19

    def test_failure_is_raised(self):
        c = random_circuit(6, 3, 15, np.random.default_rng(6), "binary")
        with pytest.raises(ReconstructionFailed) as info:
            reconstruct(oracle_for(c, np.random.default_rng(7)), 6, 3, 3)
        assert info.value.report.status in ("ambiguous", "inconsistent")
