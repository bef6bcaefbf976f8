from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelift.laurent import (
    HORIZONTAL,
    VERTICAL,
    CoefficientModeError,
    LaurentPoly1,
    LaurentPoly2,
    ZeroPolynomialError,
    orient,
    split_scalar,
)

N = 250  # randomized cases per property

fractions = st.builds(Fraction, st.integers(-64, 64), st.sampled_from([1, 2, 3, 4, 8, 16, 32]))
nonzero_fractions = st.builds(
    Fraction, st.integers(1, 64) | st.integers(-64, -1), st.sampled_from([1, 2, 3, 4, 8, 16, 32])
)
exp1 = st.integers(-6, 6)
exp2 = st.tuples(st.integers(-4, 4), st.integers(-4, 4))

poly1 = st.dictionaries(exp1, fractions, max_size=6).map(lambda d: LaurentPoly1(d, exact=True))
nonzero_poly1 = st.dictionaries(exp1, nonzero_fractions, min_size=1, max_size=6).map(
    lambda d: LaurentPoly1(d, exact=True)
)
poly2 = st.dictionaries(exp2, fractions, max_size=6).map(lambda d: LaurentPoly2(d, exact=True))


# -- ring axioms ----------------------------------------------------------------


@settings(max_examples=N)
@given(poly2, poly2)
def test_addition_commutes(p, q):
    assert p + q == q + p


@settings(max_examples=N)
@given(poly2, poly2, poly2)
def test_addition_associates(p, q, r):
    assert (p + q) + r == p + (q + r)


@settings(max_examples=N)
@given(poly2, poly2)
def test_multiplication_commutes(p, q):
    assert p * q == q * p


@settings(max_examples=N)
@given(poly2, poly2, poly2)
def test_multiplication_associates(p, q, r):
    assert (p * q) * r == p * (q * r)


@settings(max_examples=N)
@given(poly2, poly2, poly2)
def test_multiplication_distributes(p, q, r):
    assert p * (q + r) == p * q + p * r


@settings(max_examples=N)
@given(poly2)
def test_identities_and_inverse(p):
    zero, one = LaurentPoly2.zero(), LaurentPoly2.one()
    assert p + zero == p
    assert p * one == p
    assert p * zero == zero
    assert p - p == zero
    assert (p + (-p)).is_zero()


@settings(max_examples=N)
@given(poly1, poly1, poly1)
def test_univariate_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p


# -- degree ---------------------------------------------------------------------


@settings(max_examples=N)
@given(nonzero_poly1, nonzero_poly1)
def test_degree_is_additive(p, q):
    assert (p * q).degree() == p.degree() + q.degree()
    assert (p * q).min_exponent() == p.min_exponent() + q.min_exponent()


def test_degree_of_zero_is_an_error():
    with pytest.raises(ZeroPolynomialError):
        LaurentPoly1.zero().degree()


def test_degree_examples():
    assert LaurentPoly1({0: 1, -1: 1}).degree() == 1
    assert LaurentPoly1({1: 1, -2: 1, 0: 3}).degree() == 3
    assert LaurentPoly1.constant(5).degree() == 0


# -- transposition --------------------------------------------------------------


@settings(max_examples=N)
@given(poly2, poly2)
def test_transpose_is_a_ring_homomorphism(p, q):
    assert (p * q).transpose() == p.transpose() * q.transpose()
    assert (p + q).transpose() == p.transpose() + q.transpose()


@settings(max_examples=N)
@given(poly2)
def test_transpose_is_an_involution(p):
    assert p.transpose().transpose() == p
    assert p.transpose().tap_count() == p.tap_count()


@settings(max_examples=N)
@given(poly1)
def test_orientations_are_transposes(p):
    assert orient(p, HORIZONTAL).transpose() == orient(p, VERTICAL)


@settings(max_examples=N)
@given(poly1, poly1)
def test_oriented_product_separates(p, q):
    # P(z_m) * Q(z_n) has coefficient p_a * q_b at (a, b)
    prod = orient(p, HORIZONTAL) * orient(q, VERTICAL)
    assert prod.tap_count() == p.tap_count() * q.tap_count()
    for (a, b), c in prod.items():
        assert c == p.coefficient(a) * q.coefficient(b)


# -- scalar split ---------------------------------------------------------------


@settings(max_examples=N)
@given(poly1)
def test_split_reconstructs(p):
    p0, p1 = split_scalar(p)
    assert p0 + p1 == p
    assert p0.exponents() in ([], [0])
    assert 0 not in p1.exponents()


@settings(max_examples=N)
@given(poly1)
def test_split_parts_are_disjoint(p):
    p0, p1 = split_scalar(p)
    assert p0.tap_count() + p1.tap_count() == p.tap_count()


def test_split_of_cdf53_predict():
    p = LaurentPoly1({0: Fraction(-1, 2), -1: Fraction(-1, 2)})
    p0, p1 = split_scalar(p)
    assert p0 == LaurentPoly1({0: Fraction(-1, 2)})
    assert p1 == LaurentPoly1({-1: Fraction(-1, 2)})


# -- evaluation -----------------------------------------------------------------


@settings(max_examples=N)
@given(poly1, poly1, nonzero_fractions)
def test_evaluation_is_multiplicative(p, q, z):
    assert (p * q)(z) == p(z) * q(z)


@settings(max_examples=N)
@given(poly2, nonzero_fractions, nonzero_fractions)
def test_transpose_swaps_variables(p, zm, zn):
    assert p.transpose()(zm, zn) == p(zn, zm)


@settings(max_examples=N)
@given(poly1, nonzero_fractions)
def test_reflect_inverts_argument(p, z):
    assert p.reflect()(z) == p(1 / z)


# -- representation and modes ---------------------------------------------------


def test_zero_coefficients_are_dropped():
    p = LaurentPoly1({0: Fraction(0), 3: Fraction(1, 2)})
    assert p.exponents() == [3]
    assert p.tap_count() == 1


def test_mixing_modes_raises():
    exact = LaurentPoly1({0: Fraction(1, 2)})
    approx = LaurentPoly1({0: 0.5})
    with pytest.raises(CoefficientModeError):
        exact + approx
    with pytest.raises(CoefficientModeError):
        exact * approx
    with pytest.raises(CoefficientModeError):
        LaurentPoly1({0: 0.5}, exact=True)


def test_float_round_trip_of_dyadic_coefficients():
    p = LaurentPoly2({(1, 0): Fraction(-9, 16), (0, -2): Fraction(1, 32)})
    assert p.to_float().to_exact() == p
    assert not p.to_float().exact


def test_monomial_string_form():
    assert str(LaurentPoly2({(1, -1): 2})) == "2*z_m^1*z_n^-1"
    assert str(LaurentPoly1.zero()) == "0"


def test_two_variable_keys_are_validated():
    with pytest.raises(TypeError):
        LaurentPoly2({1: 1})
    with pytest.raises(TypeError):
        LaurentPoly1({(0, 1): 1})


def test_max_shift_and_nonlocal_exponents():
    p = LaurentPoly2({(0, 0): 1, (-2, 1): 1, (1, 0): 3})
    assert p.max_shift() == 2
    assert p.nonlocal_exponents() == {(-2, 1), (1, 0)}
    assert LaurentPoly2.zero().max_shift() == 0
