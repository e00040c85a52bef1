from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy

from rcvv.errors import MetaMismatchError, RcvvError
from rcvv.jacobi import (
    ThetaComponentForm,
    component_offset,
    heat_apply,
    heat_eigenvalue,
    jacobi_rc_bracket,
    theta_decompose,
    theta_recompose,
    theta_series,
)
from rcvv.qseries import FourierSeries, agree_up_to
from rcvv.verify import random_theta_form, random_vvform
from rcvv.vvforms import gen_binomial, rc_bracket, scalar_form, vv_add, vv_scale


# -- theta series --------------------------------------------------------------


def test_theta_series_even_residue():
    th = theta_series(1, 2, 9)
    # r in {0, +-2, +-4, ...}: exponents 0, 1, 4, 9
    assert th.get(0, 0) == 1
    assert th.get(1, 2) == 1
    assert th.get(1, -2) == 1
    assert th.get(4, 4) == 1
    assert th.get(2, 2) == 0
    assert th.form.kappa == 0


def test_theta_series_odd_residue():
    th = theta_series(1, 1, 9)
    # r odd: exponents 1/4, 9/4, 25/4 above kappa = 1/4
    assert th.form.kappa == Fraction(1, 4)
    assert th.get(0, 1) == 1
    assert th.get(0, -1) == 1
    assert th.get(2, 3) == 1
    assert th.get(1, 1) == 0


def test_theta_series_rejects_bad_residue():
    with pytest.raises(RcvvError):
        theta_series(1, 3, 5)


# -- decomposition round trip ----------------------------------------------------


def test_decompose_single_constant_component():
    m, kappa = 2, Fraction(0)
    comps = [
        FourierSeries(component_offset(m, mu, kappa), {0: 1} if mu == 4 else {}, 5)
        for mu in range(1, 2 * m + 1)
    ]
    f = ThetaComponentForm(m, Fraction(5, 2), kappa, comps)
    v = theta_decompose(f)
    assert v.weight == 2
    assert v.component(4).coefficient(0) == 1
    assert all(v.component(j).is_zero() for j in (1, 2, 3))


def test_decompose_linear_and_roundtrip(rng):
    for m in (1, 2, 3):
        f = random_theta_form(rng, m, 6)
        g = random_theta_form(rng, m, 6, weight=f.weight, kappa=f.kappa)
        left = theta_decompose(
            ThetaComponentForm(
                m,
                f.weight,
                f.kappa,
                tuple(a + b for a, b in zip(f.components, g.components)),
            )
        )
        right = vv_add(theta_decompose(f), theta_decompose(g))
        assert all(left.component(j) == right.component(j) for j in range(1, 2 * m + 1))
        back = theta_recompose(theta_decompose(f))
        assert back == f


def test_recompose_rejects_inconsistent_offsets(rng):
    bad = random_vvform(rng, 2, 4, weight=Fraction(9, 2))
    while bad.meta.offsets == (Fraction(3, 4), Fraction(0)):
        bad = random_vvform(rng, 2, 4, weight=Fraction(9, 2))
    with pytest.raises(MetaMismatchError):
        theta_recompose(bad)


# -- heat operator ---------------------------------------------------------------


def test_heat_eigenvalue_against_symbolic_differentiation():
    tau, z = sympy.symbols("tau z")
    for m, e, r in [(1, Fraction(1), 2), (1, Fraction(1), 0), (2, Fraction(3, 8), 1), (3, Fraction(5, 12), -4)]:
        unit = sympy.exp(2 * sympy.pi * sympy.I * (sympy.Rational(e) * tau + r * z))
        operator = -(1 / (4 * sympy.pi ** 2)) * (
            8 * sympy.pi * sympy.I * m * sympy.diff(unit, tau) - sympy.diff(unit, z, 2)
        )
        ratio = sympy.simplify(operator / unit)
        assert sympy.nsimplify(ratio) == sympy.Rational(heat_eigenvalue(m, e, r))


def test_heat_eigenvalue_examples():
    assert heat_eigenvalue(1, 1, 2) == 0
    assert heat_eigenvalue(1, 1, 0) == 4
    assert heat_eigenvalue(2, Fraction(1, 8), 1) == 0


def test_heat_apply_scales_by_component_exponent():
    m, kappa = 1, Fraction(1, 2)
    comps = [
        FourierSeries(component_offset(m, 1, kappa), {0: 7}, 4),   # exponent 1/4... offset (1/2-1/4)=1/4
        FourierSeries(component_offset(m, 2, kappa), {0: 3}, 4),   # offset 1/2
    ]
    f = ThetaComponentForm(m, 4, kappa, comps)
    assert heat_apply(f, 0) is f
    out = heat_apply(f, 2)
    # factors (4 m e)^2 with e the component exponents 1/4 and 1/2
    assert out.component(1).coefficient(0) == 7 * Fraction(1)       # (4*1/4)^2
    assert out.component(2).coefficient(0) == 3 * Fraction(4)       # (4*1/2)^2


def test_heat_commutes_with_decomposition(rng):
    from rcvv.qseries import diag_pow

    f = random_theta_form(rng, 2, 5)
    lhs = theta_decompose(heat_apply(f, 1))
    rhs = theta_decompose(f)
    for j in range(1, 5):
        assert lhs.component(j) == (diag_pow(rhs.component(j), 1) * Fraction(8))


# -- extended bracket --------------------------------------------------------------


def test_extended_bracket_identity_with_vector_valued(rng):
    for m in (1, 2, 3):
        for nu in (1, 2):
            f = random_theta_form(rng, m, 6)
            g = scalar_form(
                FourierSeries(Fraction(1, 4), {n: Fraction(rng.randint(-5, 5)) for n in range(7)}, 6),
                Fraction(7, 2),
            )
            lhs = vv_scale(theta_decompose(jacobi_rc_bracket(f, g, nu)), Fraction(1, (4 * m) ** nu))
            rhs = vv_scale(rc_bracket(theta_decompose(f), g, nu), Fraction(1, math.factorial(nu)))
            assert all(
                agree_up_to(lhs.component(j), rhs.component(j)) for j in range(1, 2 * m + 1)
            )


def test_extended_bracket_boundary_cuspidality(rng):
    f = random_theta_form(rng, 2, 5, kappa=Fraction(0))
    g = scalar_form(FourierSeries(0, {n: Fraction(rng.randint(-5, 5)) for n in range(6)}, 5), 5)
    out = jacobi_rc_bracket(f, g, 1)
    assert out.cusp_flag
    view = out.coefficients()
    m = out.index
    # exponent values with zero discriminant must vanish
    for r in range(-2 * m, 2 * m + 1):
        q_exp = Fraction(r * r, 4 * m)
        assert view.get_by_exponent(q_exp, r) == 0


def test_extended_bracket_single_term_hand_expansion():
    """One theta-kernel term against a constant with fractional offset: only
    the no-heat term survives, scaled by C(nu+k-3/2, nu) (-4m)^nu kappa_g^nu."""
    m, nu = 1, 2
    k = Fraction(4)
    kappa_g = Fraction(1, 2)
    comps = [
        FourierSeries(component_offset(m, 1, Fraction(1, 4)), {0: 1}, 6),  # exponent 0
        FourierSeries(component_offset(m, 2, Fraction(1, 4)), {}, 6),
    ]
    f = ThetaComponentForm(m, k, Fraction(1, 4), comps)
    g = scalar_form(FourierSeries(kappa_g, {0: 3}, 6), Fraction(5))
    out = jacobi_rc_bracket(f, g, nu)
    want = (
        gen_binomial(nu + k - Fraction(3, 2), nu)
        * Fraction(-4 * m) ** nu
        * kappa_g ** nu
        * 3
    )
    assert out.component(1).coefficient(0) == want
    assert out.weight == k + 5 + 2 * nu
    assert out.kappa == Fraction(3, 4)


def test_extended_bracket_requires_scalar_second_factor(rng):
    f = random_theta_form(rng, 1, 4)
    with pytest.raises(MetaMismatchError):
        jacobi_rc_bracket(f, random_vvform(rng, 2, 4), 1)


def test_support_and_cusp_validation():
    m = 1
    with pytest.raises(MetaMismatchError):
        # wrong component count
        ThetaComponentForm(m, 4, 0, [FourierSeries(0, {}, 3)])
    comps = [
        FourierSeries(component_offset(m, 1, Fraction(0)), {0: 1}, 3),
        FourierSeries(component_offset(m, 2, Fraction(0)), {0: 1}, 3),
    ]
    with pytest.raises(MetaMismatchError):
        # exponent-0 coefficient forbids the cusp flag
        ThetaComponentForm(m, 4, 0, comps, cusp_flag=True)


def test_view_reindexing_consistency(rng):
    f = random_theta_form(rng, 2, 6, kappa=Fraction(1, 3))
    view = f.coefficients()
    m = f.index
    # c(n+kappa, r) depends on r only through the discriminant and residue
    for r in (1, 5, -3):
        mu = (r - 1) % (2 * m) + 1
        shift = Fraction(r * r - mu * mu, 4 * m)
        assert shift.denominator == 1
        for n, c in f.component(mu).items():
            q_exp = n + f.component(mu).offset + Fraction(r * r, 4 * m)
            assert view.get_by_exponent(q_exp, r) == c
    # outside the support the table reads zero
    assert view.get(-5, 1) == 0


def test_heat_annihilates_theta_directions():
    """A pure theta direction (single constant component at exponent 0) is
    killed by one application of the heat operator."""
    th = theta_series(2, 3, 6).form
    out = heat_apply(th, 1)
    assert out.is_zero()
