import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl2d import field, lucas_binom, power_sum
from gl2d.errors import ConfigRejected, DivisionByZero, IncompleteData, InvalidExponent
from gl2d.gf import (
    FieldParams,
    TensorPoly,
    interpolate,
    is_irreducible,
    smallest_irreducible,
    vandermonde,
)


def test_modulus_is_deterministic_and_irreducible():
    assert smallest_irreducible(2, 2) == (1, 1)  # x^2 + x + 1
    assert smallest_irreducible(3, 2) == (1, 0)  # x^2 + 1
    assert smallest_irreducible(7, 2) == (1, 0)
    for p, d in ((2, 4), (3, 3), (5, 2)):
        m = smallest_irreducible(p, d)
        assert is_irreducible(list(m), p)


def test_reducible_modulus_rejected():
    # x^2 - 1 = (x-1)(x+1) over F_3
    with pytest.raises(ConfigRejected):
        FieldParams(3, 1, 2, modulus=(2, 0))


def test_field_cap():
    with pytest.raises(ConfigRejected):
        field(7, 5, 1)


def test_additive_identity_and_inverse_roundtrip(f49):
    x = f49.element(23)
    assert (f49.element(0) + x).code == 23
    inv = x.inverse()
    assert (x * inv).code == 1
    with pytest.raises(DivisionByZero):
        f49.element(0).inverse()


def test_frobenius_squares_generator_f4(f4):
    g = f4.element(f4.generator)
    assert g.frobenius_p() == g * g
    for c in range(4):
        el = f4.element(c)
        assert el.frobenius_p().frobenius_p() == el


@given(st.integers(0, 199), st.integers(0, 199), st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=300, deadline=None)
def test_lucas_matches_factorial_oracle(m, n, p):
    assert lucas_binom(m, n, p) == math.comb(m, n) % p


def test_lucas_examples():
    assert lucas_binom(5, 0, 5) == 1
    # digits of 10 base 3 are (1,0,1), of 4 are (1,1,0): middle digit fails
    assert lucas_binom(10, 4, 3) == 0
    assert math.comb(10, 4) % 3 == 0
    assert lucas_binom(6, 3, 5) == 0
    assert math.comb(6, 3) % 5 == 0


@pytest.mark.parametrize("p,f,w", [(2, 1, 1), (3, 1, 1), (2, 2, 1), (3, 2, 1), (7, 2, 1), (7, 1, 2)])
def test_power_sum_two_cases(p, f, w):
    Fq = field(p, f, w)
    Q = Fq.order
    # brute enumeration oracle
    for j in range(Q):
        acc = 0
        for c in range(Q):
            acc = int(Fq.ADD[acc, Fq.pow_int(c, j)])
        assert power_sum(Fq, j).code == acc
        assert acc == (int(Fq.NEG[1]) if j == Q - 1 else 0)
    with pytest.raises(InvalidExponent):
        power_sum(Fq, Q)


def test_power_sum_f4_value(f4):
    # 0 + 1 + w^3 + (w^2)^3 = 1 + 1 + 1 = 1 = -1 in characteristic 2
    assert power_sum(f4, 3).code == 1
    assert power_sum(f4, 1).code == 0


def test_power_sum_f9_j0(f9):
    assert power_sum(f9, 0).code == 0  # nine ones in characteristic 3


class TestInterpolation:
    def test_constant_map(self, f9):
        poly = interpolate(f9, 1, np.full(9, 5, dtype=np.int16))
        assert poly.monomials() == [((0,), 5)]

    def test_frobenius_power_collapses(self, f9):
        vals = np.asarray([f9.pow_int(c, 9) for c in range(9)], dtype=np.int16)
        poly = interpolate(f9, 1, vals)
        assert poly.monomials() == [((1,), 1)]

    def test_roundtrip_exhaustive_small(self):
        rng = np.random.default_rng(7)
        for (p, f, w) in ((2, 1, 1), (3, 1, 1), (2, 2, 1), (3, 2, 1)):
            Fq = field(p, f, w)
            Q = Fq.order
            for nvars in (1, 2):
                vals = np.asarray(rng.integers(0, Q, (Q,) * nvars), dtype=np.int16)
                poly = interpolate(Fq, nvars, vals)
                assert np.array_equal(poly.evaluate_all(), vals)
                for point in np.ndindex(*(Q,) * nvars):
                    assert poly.evaluate(point) == vals[point]
                back = interpolate(Fq, nvars, TensorPoly(Fq, poly.coeffs).evaluate_all())
                assert np.array_equal(back.coeffs, poly.coeffs)

    def test_partial_map_rejected(self, f4):
        with pytest.raises(IncompleteData):
            interpolate(f4, 1, {(0,): 1})

    def test_dict_input(self, f4):
        vals = {(c,): int(f4.MUL[c, c]) for c in range(4)}
        poly = interpolate(f4, 1, vals)
        for c in range(4):
            assert poly.evaluate((c,)) == int(f4.MUL[c, c])


def test_frobenius_q_fixes_exactly_subfield(f49w2):
    fixed = [c for c in range(49) if f49w2.frob_q_power(c, 1) == c]
    assert len(fixed) == 7


@given(st.integers(0, 48), st.integers(0, 48), st.integers(0, 48))
@settings(max_examples=200, deadline=None)
def test_field_axioms_f49(a, b, c):
    F = field(7, 2, 1)
    assert F.ADD[a, b] == F.ADD[b, a]
    assert F.MUL[a, b] == F.MUL[b, a]
    assert F.MUL[a, F.ADD[b, c]] == F.ADD[F.MUL[a, b], F.MUL[a, c]]
    assert F.ADD[F.ADD[a, b], c] == F.ADD[a, F.ADD[b, c]]
    assert F.MUL[F.MUL[a, b], c] == F.MUL[a, F.MUL[b, c]]


def test_vandermonde_is_power_table(f9):
    V = vandermonde(f9)
    for c in range(9):
        for e in range(9):
            assert V[c, e] == f9.pow_int(c, e)
    assert V[0, 0] == 1  # 0^0 = 1 convention
