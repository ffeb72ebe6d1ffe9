from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phaselearn.f2poly import F2Poly, bits, insert_index, monomial_order
from phaselearn.zqpoly import (
    ZqPoly,
    derivative_q,
    embed_binary,
    equivalent,
    format_zq,
    from_values,
    is_stabilizer_phase,
    nonconstant_miss_fraction,
    parse_zq,
    random_stabilizer_phase,
    random_zq_poly,
)


def Z(n, q, *terms):
    return ZqPoly.from_terms(n, q, terms)


@st.composite
def zq_polys(draw, max_n=6, max_d=3, qs=(2, 4, 8)):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(1, min(n, max_d)))
    q = draw(st.sampled_from(qs))
    cols = monomial_order(n, d)
    coeffs = draw(st.dictionaries(st.sampled_from(cols), st.integers(0, q - 1)))
    return ZqPoly(n, q, coeffs)


class TestBasics:
    def test_normalization(self):
        f = ZqPoly(2, 4, {0b11: 7, 0b01: 4})
        assert dict(f.coeffs) == {0b11: 3}

    def test_odd_modulus_rejected(self):
        with pytest.raises(ValueError):
            ZqPoly(2, 3, {})

    def test_eval_examples(self):
        assert ZqPoly(3, 4).eval(bits("101")) == 0
        assert Z(2, 4, (3, (1, 2))).eval(bits("11")) == 3
        assert Z(2, 4, (3, (1, 2)), (2, (2,))).eval(bits("01")) == 2

    def test_eval_dimension(self):
        with pytest.raises(ValueError):
            Z(2, 4, (1, (1,))).eval(4)

    @given(zq_polys(), zq_polys())
    def test_add_sub(self, f, g):
        if (f.n, f.q) != (g.n, g.q):
            return
        h = f + g
        k = f - g
        for x in range(1 << f.n):
            assert h.eval(x) == (f.eval(x) + g.eval(x)) % f.q
            assert k.eval(x) == (f.eval(x) - g.eval(x)) % f.q

    def test_values_vector(self):
        f = Z(3, 8, (5, (1, 3)), (3, (2,)), (1, ()))
        assert f.values().tolist() == [f.eval(x) for x in range(8)]


class TestDerivative:
    def test_examples(self):
        assert derivative_q(Z(2, 4, (3, (1, 2))), 1) == Z(1, 4, (3, (1,)))
        assert derivative_q(Z(3, 4, (2, (3,))), 1) == ZqPoly(2, 4)

    def test_full_enumeration_p4_5_2(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            f = random_zq_poly(5, 2, 4, rng, constant=True)
            for k in range(1, 6):
                g = derivative_q(f, k)
                for y in range(16):
                    assert g.eval(y) == (f.eval(insert_index(y, k, 1)) - f.eval(insert_index(y, k, 0))) % 4

    @given(zq_polys(), st.data())
    def test_identity_and_degree(self, f, data):
        k = data.draw(st.integers(1, f.n))
        g = derivative_q(f, k)
        for y in range(1 << (f.n - 1)):
            assert g.eval(y) == (f.eval(insert_index(y, k, 1)) - f.eval(insert_index(y, k, 0))) % f.q
        if g.coeffs:
            assert g.degree <= f.degree - 1

    def test_index_range(self):
        with pytest.raises(IndexError):
            derivative_q(Z(2, 4, (1, (1,))), 3)


class TestEquivalence:
    def test_shift(self):
        f = Z(3, 8, (3, (1, 2)), (1, (3,)))
        for c in range(1, 8):
            assert equivalent(f, f.shift(c))

    def test_x1_vs_2x1(self):
        assert not equivalent(Z(1, 4, (1, (1,))), Z(1, 4, (2, (1,))))

    @given(zq_polys(max_n=5), st.data())
    def test_agrees_with_enumeration(self, f, data):
        g = ZqPoly(f.n, f.q, {m: data.draw(st.integers(0, f.q - 1)) for m in f.coeffs})
        diffs = {(f.eval(x) - g.eval(x)) % f.q for x in range(1 << f.n)}
        assert equivalent(f, g) == (len(diffs) == 1)


class TestMissFraction:
    def test_constants(self):
        assert nonconstant_miss_fraction(Z(3, 4, (2, ())), 2) == 0
        assert nonconstant_miss_fraction(Z(3, 4, (2, ())), 1) == 1

    def test_exhaustive_p4_4_2(self):
        # every nonconstant f in P_4(4,2) with coefficients in {0,1,3} on a fixed support pattern
        cols = monomial_order(4, 2)[1:]
        rng = np.random.default_rng(1)
        worst = Fraction(1)
        for _ in range(3000):
            f = ZqPoly(4, 4, {m: int(v) for m, v in zip(cols, rng.integers(0, 4, size=len(cols)))})
            if not f.coeffs:
                continue
            for c in range(4):
                worst = min(worst, nonconstant_miss_fraction(f, c))
        assert worst >= Fraction(1, 4)

    @given(zq_polys(max_n=8, qs=(4, 8)), st.integers(0, 7))
    def test_bound_two_to_minus_degree(self, f, c):
        if not f.drop_constant().coeffs:
            return
        assert nonconstant_miss_fraction(f, c) >= Fraction(1, 1 << f.degree)


class TestEmbedding:
    def test_phase_agrees(self):
        rng = np.random.default_rng(4)
        cols = monomial_order(5, 3)
        for q in (2, 4, 8):
            for _ in range(10):
                keep = rng.integers(0, 2, size=len(cols))
                fb = F2Poly(5, frozenset(c for c, k in zip(cols, keep) if k))
                fz = embed_binary(fb, q)
                for x in range(32):
                    assert fz.eval(x) == (q // 2) * fb.eval(x) % q
                    assert np.isclose(np.exp(2j * np.pi * fz.eval(x) / q), (-1) ** fb.eval(x))


class TestMobius:
    @given(zq_polys(max_n=6, max_d=3))
    def test_from_values(self, f):
        d = max(f.degree, 0)
        known = {x: f.eval(x) for x in range(1 << f.n)}
        assert from_values(f.n, f.q, known, d) == f


class TestStabilizerPhase:
    def test_shape(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            f = random_stabilizer_phase(6, rng)
            assert is_stabilizer_phase(f)
            assert all(c == 2 for m, c in f.coeffs.items() if bin(m).count("1") == 2)

    def test_rejects_odd_quadratic(self):
        assert not is_stabilizer_phase(Z(2, 4, (1, (1, 2))))


class TestText:
    def test_roundtrip_example(self):
        f = Z(3, 4, (3, (1, 2)), (2, (2,)), (1, ()))
        text = format_zq(f)
        assert text == "n=3 d=2 q=4\n1:\n2:2\n3:1 2\n"
        assert parse_zq(text) == f

    @given(zq_polys())
    def test_roundtrip(self, f):
        assert parse_zq(format_zq(f)) == f

    @pytest.mark.parametrize("bad", ["n=2 q=4\n1 2\n", "n=2 q=4\n1:3\n", "", "n=2 d=1 q=4\n1:1 2\n"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_zq(bad)
