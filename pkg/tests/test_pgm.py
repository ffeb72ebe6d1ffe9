import math

import numpy as np
import pytest

from phaselearn.f2poly import F2Poly
from phaselearn.pgm import (
    CapExceeded,
    Ensemble,
    StateVector,
    all_polys,
    avg_pairwise_overlap,
    build_state,
    ghz_noise_distance,
    measurement_entropy,
    pgm_measurement,
    resolve_unitary,
    second_moment_average,
    second_moment_closed_form,
    shannon_entropy,
)
from phaselearn.zqpoly import ZqPoly


def P(n, *terms):
    return F2Poly.from_terms(n, terms)


class TestStates:
    def test_amplitudes(self):
        s = build_state(P(2, (1, 2)))
        assert np.allclose(s.amplitudes, [0.5, 0.5, 0.5, -0.5])

    def test_generalized_amplitudes(self):
        s = build_state(ZqPoly.from_terms(1, 4, [(1, (1,))]))
        assert np.allclose(s.amplitudes, [1 / math.sqrt(2), 1j / math.sqrt(2)])

    def test_norm_check(self):
        with pytest.raises(ValueError):
            StateVector(1, np.array([1.0, 1.0]))

    def test_cap(self):
        with pytest.raises(CapExceeded):
            build_state(F2Poly.zero(20))

    def test_all_polys_count(self):
        assert len(all_polys(3, 2)) == 64
        assert len(all_polys(3, 2, constant=True)) == 128


class TestSecondMoment:
    def test_brute_force_n3(self):
        # direct sum of |psi><psi|^{x2} over all of P(3,2)
        polys = all_polys(3, 2)
        acc = 0
        for f in polys:
            v = build_state(f).amplitudes.real
            vv = np.kron(v, v)
            acc = acc + np.outer(vv, vv)
        acc /= len(polys)
        assert np.abs(acc - second_moment_closed_form(3)).max() < 1e-12

    def test_exact_n4(self):
        out = second_moment_average(4, 2)
        assert out.stderr is None and out.samples == 1 << 10
        assert out.max_diff < 1e-12

    def test_closed_form_is_density(self):
        C = second_moment_closed_form(3)
        assert np.isclose(np.trace(C), 1.0)
        assert np.allclose(C, C.T)
        assert np.linalg.eigvalsh(C).min() > -1e-12

    def test_needs_d2(self):
        with pytest.raises(ValueError):
            second_moment_average(3, 1)


class TestPGM:
    def test_orthonormal_is_perfect(self):
        # linear phases on 3 qubits are the Hadamard basis
        polys = [F2Poly(3, frozenset(m for m in (1, 2, 4) if (mask >> (m.bit_length() - 1)) & 1)) for mask in range(8)]
        res = pgm_measurement(Ensemble.from_polys(polys))
        assert np.allclose(res.probabilities, 1.0) and res.rank == 8

    def test_two_states_matches_helstrom(self):
        a = build_state(F2Poly.zero(2))
        b = build_state(ZqPoly.from_terms(2, 4, [(1, (1,))]))
        c = abs(a.overlap(b))
        res = pgm_measurement(Ensemble([a, b]))
        assert np.allclose(res.probabilities, (1 + math.sqrt(1 - c**2)) / 2)

    @pytest.mark.parametrize("M", [1, 2])
    def test_uniform_success(self, M):
        ens = Ensemble.from_polys(all_polys(3, 2, constant=True), copies=M)
        res = pgm_measurement(ens)
        p = res.probabilities
        assert p.max() - p.min() < 1e-9
        assert res.completeness_error < 1e-9

    def test_more_copies_help(self):
        polys = all_polys(3, 2)
        p1 = pgm_measurement(Ensemble.from_polys(polys, 1)).probabilities.mean()
        p2 = pgm_measurement(Ensemble.from_polys(polys, 2)).probabilities.mean()
        assert p2 > p1

    def test_distinct_labels(self):
        with pytest.raises(ValueError):
            Ensemble.from_polys([F2Poly.zero(2), F2Poly.zero(2)])


class TestOverlap:
    def test_closed_values(self):
        ens = Ensemble.from_polys(all_polys(3, 2))
        for k in range(1, 8):
            assert math.isclose(avg_pairwise_overlap(ens, k), 28 / 4**k, rel_tol=1e-9)

    def test_decreasing(self):
        ens = Ensemble.from_polys(all_polys(3, 2))
        vals = [avg_pairwise_overlap(ens, k) for k in range(1, 6)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestGHZ:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_formula(self, n):
        for eps in np.linspace(0, 1, 11):
            assert abs(ghz_noise_distance(n, eps) - 2 * (1 - eps) ** n) < 1e-10

    def test_range(self):
        with pytest.raises(ValueError):
            ghz_noise_distance(2, 1.5)


class TestEntropy:
    def test_identity_is_maximal(self):
        assert math.isclose(measurement_entropy(3, 2), 3.0)
        assert math.isclose(measurement_entropy(4, 2), 4.0)

    def test_hadamard_frozen(self):
        # exhaustive values, computed once and frozen
        assert math.isclose(measurement_entropy(3, 2, "hadamard"), 1.75)

    def test_hadamard_brute(self):
        H = resolve_unitary(3, "hadamard")
        ent = []
        for f in all_polys(3, 2):
            p = np.abs(H @ build_state(f).amplitudes) ** 2
            ent.append(shannon_entropy(p))
        assert math.isclose(np.mean(ent), measurement_entropy(3, 2, "hadamard"))

    @pytest.mark.parametrize("seed", range(5))
    def test_random_above_bound(self, seed):
        assert measurement_entropy(3, 2, "random", seed) >= 1.0

    def test_random_unitary_is_unitary(self):
        U = resolve_unitary(3, "random", 0)
        assert np.allclose(U @ U.conj().T, np.eye(8))

    def test_cap(self):
        with pytest.raises(CapExceeded):
            measurement_entropy(5, 2)

