from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest

from rcvv.errors import PoleDegeneracyError, RcvvError
from rcvv.symbolic import SymbolicValue


def test_integer_gamma_folds_to_factorial():
    assert SymbolicValue.gamma(11) == SymbolicValue.from_rational(math.factorial(10))


def test_half_integer_gamma_folds_to_sqrt_pi():
    # gamma(7/2) = (5/2)(3/2)(1/2) sqrt(pi)
    want = SymbolicValue.term(Fraction(15, 8), pi_pow=Fraction(1, 2))
    assert SymbolicValue.gamma(Fraction(7, 2)) == want
    # gamma(-1/2) = -2 sqrt(pi)
    want = SymbolicValue.term(-2, pi_pow=Fraction(1, 2))
    assert SymbolicValue.gamma(Fraction(-1, 2)) == want


def test_general_rational_gamma_reduces_to_unit_interval():
    # gamma(7/3) = (4/3)(1/3) gamma(1/3)
    want = SymbolicValue.term(Fraction(4, 9), gammas=[(Fraction(1, 3), 1)])
    assert SymbolicValue.gamma(Fraction(7, 3)) == want


def test_gamma_pole_reported():
    with pytest.raises(PoleDegeneracyError):
        SymbolicValue.gamma(0)
    with pytest.raises(PoleDegeneracyError):
        SymbolicValue.gamma(-3)


def test_power_canonicalisation():
    # 4^(5/2) = 2^5
    assert SymbolicValue.power(4, Fraction(5, 2)) == SymbolicValue.from_rational(32)
    # 8^(-1/2) = (1/4) * 2^(1/2)
    want = SymbolicValue.term(Fraction(1, 4), powers=[(2, Fraction(1, 2))])
    assert SymbolicValue.power(8, Fraction(-1, 2)) == want
    # (9/2)^(1/2) = (3/2) * 2^(1/2)
    want = SymbolicValue.term(Fraction(3, 2), powers=[(2, Fraction(1, 2))])
    assert SymbolicValue.power(Fraction(9, 2), Fraction(1, 2)) == want


def test_product_merges_fractional_exponents():
    a = SymbolicValue.power(2, Fraction(1, 2))
    assert a * a == SymbolicValue.from_rational(2)
    b = SymbolicValue.power(6, Fraction(1, 2))
    assert a * b == SymbolicValue.term(2, powers=[(3, Fraction(1, 2))])


def test_addition_collects_like_terms():
    a = SymbolicValue.term(Fraction(1, 3), pi_pow=2)
    b = SymbolicValue.term(Fraction(2, 3), pi_pow=2)
    assert a + b == SymbolicValue.term(1, pi_pow=2)
    assert (a - a).is_zero()


def test_mixed_sum_keeps_distinct_signatures():
    v = SymbolicValue.one() + SymbolicValue.term(1, pi_pow=1)
    assert not v.is_rational()
    with pytest.raises(RcvvError):
        v.as_fraction()
    with pytest.raises(RcvvError):
        v.inverse()


def test_inverse_of_single_term():
    v = SymbolicValue.term(Fraction(3, 4), pi_pow=-2, powers=[(2, Fraction(1, 2))])
    assert v * v.inverse() == SymbolicValue.one()


def test_numeric_evaluation_matches_mpmath():
    v = SymbolicValue.term(
        Fraction(7, 5),
        gammas=[(Fraction(1, 3), 2)],
        pi_pow=Fraction(-3, 2),
        powers=[(6, Fraction(1, 2))],
    )
    with mpmath.workprec(80):
        want = (
            mpmath.mpf(7) / 5
            * mpmath.gamma(mpmath.mpf(1) / 3) ** 2
            * mpmath.pi ** (mpmath.mpf(-3) / 2)
            * mpmath.sqrt(6)
        )
        assert abs(v.evaluate(80) - want) < mpmath.mpf(2) ** -70


def test_zero_annihilates():
    v = SymbolicValue.term(5, pi_pow=3)
    assert (v * SymbolicValue.zero()).is_zero()
    assert (v * 0).is_zero()
    assert SymbolicValue.from_rational(0).is_zero()


def test_string_form_is_deterministic():
    v = SymbolicValue.term(Fraction(-3, 2), pi_pow=Fraction(1, 2)) + SymbolicValue.one()
    assert v.as_string() == "1 + -3/2 * pi^(1/2)"


from hypothesis import given, settings
from hypothesis import strategies as st

positive_rationals = st.builds(Fraction, st.integers(1, 60), st.integers(1, 12))
exponents = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 6))


@given(positive_rationals, exponents, exponents)
@settings(max_examples=80, deadline=None)
def test_power_canonicalisation_is_multiplicative(base, e1, e2):
    lhs = SymbolicValue.power(base, e1) * SymbolicValue.power(base, e2)
    rhs = SymbolicValue.power(base, e1 + e2)
    assert lhs == rhs


@given(positive_rationals, positive_rationals, exponents)
@settings(max_examples=80, deadline=None)
def test_power_splits_over_products(b1, b2, e):
    lhs = SymbolicValue.power(b1, e) * SymbolicValue.power(b2, e)
    rhs = SymbolicValue.power(b1 * b2, e)
    assert lhs == rhs


@given(st.builds(Fraction, st.integers(1, 200), st.integers(1, 9)))
@settings(max_examples=80, deadline=None)
def test_gamma_functional_equation(x):
    assert SymbolicValue.gamma(x + 1) == SymbolicValue.gamma(x) * x


@given(positive_rationals, exponents)
@settings(max_examples=60, deadline=None)
def test_power_numeric_agreement(base, e):
    import mpmath

    v = SymbolicValue.power(base, e)
    with mpmath.workprec(80):
        want = mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                            mpmath.mpf(e.numerator) / e.denominator)
        got = v.evaluate(80)
        assert abs(got - want) <= abs(want) * mpmath.mpf(2) ** -60
