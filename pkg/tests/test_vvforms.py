from __future__ import annotations

from fractions import Fraction

import pytest
import sympy

from rcvv import fixtures
from rcvv.errors import MetaMismatchError, PoleDegeneracyError
from rcvv.qseries import FourierSeries, agree_up_to
from rcvv.verify import random_vvform
from rcvv.vvforms import (
    MultiplierData,
    VVForm,
    as_tensor,
    bracket_plan,
    gamma_ratio,
    gen_binomial,
    rc_bracket,
    swap_slots,
    tensor_meta,
    vv_add,
    vv_scale,
)


# -- rising ratios and binomials ---------------------------------------------


def test_gamma_ratio_examples():
    assert gamma_ratio(4, 1, 0) == 4
    assert gamma_ratio(Fraction(9, 2), 3, 3) == 1
    assert gamma_ratio(Fraction(7, 2), 2, 0) == Fraction(63, 4)


def test_gamma_ratio_equals_gamma_quotient():
    for k, nu, i in [(3, 4, 1), (5, 2, 0), (7, 3, 2)]:
        want = sympy.gamma(k + nu) / sympy.gamma(k + i)
        assert gamma_ratio(k, nu, i) == int(want)


def test_gamma_ratio_pole():
    with pytest.raises(PoleDegeneracyError):
        gamma_ratio(-1, 2, 0)  # factor k+1 = 0


def test_gen_binomial_examples():
    assert gen_binomial(Fraction(3, 2), 1) == Fraction(3, 2)
    assert gen_binomial(Fraction(11, 7), 0) == 1
    assert gen_binomial(Fraction(9, 2), 2) == Fraction(63, 8)
    assert gen_binomial(5, 2) == 10


# -- tensor metadata ----------------------------------------------------------


def test_tensor_meta_offsets_fold():
    m1 = MultiplierData(4, (Fraction(0),))
    m2 = MultiplierData(6, (Fraction(0),))
    assert tensor_meta(m1, m2).offsets == (Fraction(0),)
    m1 = MultiplierData(4, (Fraction(1, 4),))
    m2 = MultiplierData(6, (Fraction(3, 4),))
    tm = tensor_meta(m1, m2)
    assert tm.offsets == (Fraction(0),)
    assert tm.carry(1, 1) == 1


def test_tensor_meta_row_major_order():
    m1 = MultiplierData(4, (Fraction(0), Fraction(1, 2)))
    m2 = MultiplierData(6, (Fraction(0), Fraction(1, 3), Fraction(1, 4)))
    tm = tensor_meta(m1, m2)
    order = [tm.slot_pair(i) for i in range(6)]
    assert order == [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]
    assert tm.slot_index(2, 3) == 5


def test_vvform_validation():
    meta = MultiplierData(4, (Fraction(1, 2),))
    with pytest.raises(MetaMismatchError):
        VVForm(meta, (FourierSeries(0, {0: 1}, 3),))  # wrong offset
    with pytest.raises(MetaMismatchError):
        VVForm(MultiplierData(4, (Fraction(0),)), (FourierSeries(0, {0: 1}, 3),), cusp_flag=True)


# -- bracket plan and weights -------------------------------------------------


def test_bracket_plan_weights():
    plan = bracket_plan(4, 6, 1)
    # w_i = (-1)^(1-i) C(1,i) R(k1,1,i) R(k2,1,1-i)
    assert plan.weights == (Fraction(-4), Fraction(6))
    assert plan.weight_out() == 12
    plan = bracket_plan(Fraction(7, 2), 5, 2)
    assert len(plan.weights) == 3
    # R(k, nu, nu) = 1 makes the leading weight C(nu,nu) R(k2,...)-free
    assert plan.weights[2] == gamma_ratio(5, 2, 0)


def test_bracket_rejects_nu_zero():
    E4 = fixtures.e4(5)
    with pytest.raises(Exception):
        rc_bracket(E4, E4, 0)


# -- golden scalar identities --------------------------------------------------


def _sigma_oracle(k, n):
    return int(sympy.divisor_sigma(n, k))


def test_fixture_coefficients_against_sympy_oracle():
    E4 = fixtures.e4(8).component(1)
    E6 = fixtures.e6(8).component(1)
    assert [E4.coefficient(n) for n in range(4)] == [1, 240, 2160, 6720]
    assert E6.coefficient(1) == -504
    for n in range(1, 9):
        assert E4.coefficient(n) == 240 * _sigma_oracle(3, n)
        assert E6.coefficient(n) == -504 * _sigma_oracle(5, n)


def test_discriminant_series_from_independent_convolution():
    """Oracle: build the weight-12 cusp form by direct dict convolution of
    the divisor-sum expansions, entirely outside the library kernel."""
    n_max = 12
    e4 = {n: 240 * _sigma_oracle(3, n) for n in range(1, n_max + 1)}
    e4[0] = 1
    e6 = {n: -504 * _sigma_oracle(5, n) for n in range(1, n_max + 1)}
    e6[0] = 1

    def conv(a, b):
        out = {}
        for i, ai in a.items():
            for j, bj in b.items():
                if i + j <= n_max:
                    out[i + j] = out.get(i + j, 0) + ai * bj
        return out

    e4cubed = conv(conv(e4, e4), e4)
    e6sq = conv(e6, e6)
    delta_oracle = {n: Fraction(e4cubed.get(n, 0) - e6sq.get(n, 0), 1728) for n in range(n_max + 1)}
    assert [delta_oracle[n] for n in range(1, 7)] == [1, -24, 252, -1472, 4830, -6048]
    lib = fixtures.delta(n_max).component(1)
    for n in range(n_max + 1):
        assert lib.coefficient(n) == delta_oracle[n]


def test_golden_bracket_of_weight4_and_weight6():
    n_max = 20
    E4 = fixtures.e4(n_max)
    E6 = fixtures.e6(n_max)
    out = rc_bracket(E4, E6, 1)
    assert out.weight == 12
    want = vv_scale(fixtures.delta(n_max), 3456)
    assert agree_up_to(out.component(1), want.component(1), n_max - 1)


def test_equal_weight_order_one_bracket_vanishes():
    E4 = fixtures.e4(12)
    assert rc_bracket(E4, E4, 1).is_zero()


def test_bracket_constant_term_vanishes():
    out = rc_bracket(fixtures.e4(10), fixtures.e6(10), 1)
    assert out.component(1).coefficient(0) == 0
    assert out.cusp_flag


# -- structural properties -----------------------------------------------------


def test_weight_additivity(rng):
    for _ in range(10):
        nu = rng.randint(1, 3)
        f1 = random_vvform(rng, rng.randint(1, 2), 4)
        f2 = random_vvform(rng, rng.randint(1, 2), 4)
        out = rc_bracket(f1, f2, nu)
        assert out.weight == f1.weight + f2.weight + 2 * nu


def test_swap_identity(rng):
    for _ in range(25):
        nu = rng.choice((1, 2, 3))
        f1 = random_vvform(rng, rng.randint(1, 3), 5)
        f2 = random_vvform(rng, rng.randint(1, 3), 5)
        lhs = rc_bracket(f1, f2, nu)
        rhs = vv_scale(swap_slots(rc_bracket(f2, f1, nu)), Fraction((-1) ** nu))
        assert all(
            agree_up_to(lhs.component(j), rhs.component(j)) for j in range(1, lhs.dim + 1)
        )


def test_swap_involution_and_slot_map(rng):
    f1 = random_vvform(rng, 2, 4)
    f2 = random_vvform(rng, 3, 4)
    out = rc_bracket(f1, f2, 1)
    swapped = swap_slots(out)
    assert swapped.component(swapped.meta.slot_index(2, 1) + 1) == out.component(
        out.meta.slot_index(1, 2) + 1
    )
    again = swap_slots(swapped)
    assert all(
        again.component(j) == out.component(j) for j in range(1, out.dim + 1)
    )


def test_swap_requires_tensor_meta(rng):
    with pytest.raises(MetaMismatchError):
        swap_slots(random_vvform(rng, 2, 4))


def test_bilinearity(rng):
    for _ in range(10):
        nu = rng.randint(1, 2)
        d1, d2 = rng.randint(1, 2), rng.randint(1, 2)
        f1 = random_vvform(rng, d1, 5)
        f1b = VVForm(
            f1.meta,
            tuple(
                FourierSeries(s.offset, {n: Fraction(rng.randint(-5, 5)) for n in range(6)}, 5)
                for s in f1.components
            ),
        )
        f2 = random_vvform(rng, d2, 5)
        c = Fraction(rng.randint(-4, 4), rng.choice([1, 2]))
        lhs = rc_bracket(vv_add(f1, vv_scale(f1b, c)), f2, nu)
        rhs = vv_add(rc_bracket(f1, f2, nu), vv_scale(rc_bracket(f1b, f2, nu), c))
        assert all(
            agree_up_to(lhs.component(j), rhs.component(j)) for j in range(1, lhs.dim + 1)
        )


def test_cuspidality_random(rng):
    for _ in range(30):
        nu = rng.randint(1, 3)
        out = rc_bracket(
            random_vvform(rng, rng.randint(1, 3), 4),
            random_vvform(rng, rng.randint(1, 3), 4),
            nu,
        )
        for series in out.components:
            if series.offset == 0:
                assert series.coefficient(0) == 0


def test_as_tensor_validates_folding():
    E4 = fixtures.e4(6)
    meta2 = MultiplierData(12, (Fraction(0),))
    f = fixtures.e6_delta(6)
    tagged = as_tensor(f, E4.meta, meta2)
    assert tagged.meta.factors == (E4.meta, meta2)
    with pytest.raises(MetaMismatchError):
        as_tensor(f, E4.meta, MultiplierData(12, (Fraction(1, 2),)))


def test_theta_like_quarter_offsets():
    th = fixtures.theta_like_quarter(12).component(1)
    assert th.offset == Fraction(1, 4)
    assert th.coefficient(0) == 2   # exponent 1/4
    assert th.coefficient(2) == 2   # exponent 9/4
    assert th.coefficient(1) == 0
    assert th.coefficient(6) == 2   # exponent 25/4
