from __future__ import annotations

import math
from fractions import Fraction

import pytest

from rcvv import fixtures
from rcvv.errors import MetaMismatchError, RcvvError
from rcvv.jacobi import theta_decompose
from rcvv.pairing import (
    bracket_adjoint,
    bracket_pairing,
    jacobi_bracket_adjoint,
    jacobi_bracket_pairing,
    poincare_pairing,
    skew_bracket_adjoint,
    skew_bracket_pairing,
)
from rcvv.qseries import FourierSeries
from rcvv.skewjacobi import skew_theta_decompose
from rcvv.symbolic import SymbolicValue
from rcvv.verify import (
    random_series,
    random_skew_form,
    random_theta_form,
    random_vvform,
)
from rcvv.vvforms import MultiplierData, VVForm, as_tensor, scalar_form, tensor_meta


def _random_tensor_cusp(rng, m1, m2, nu, precision=8):
    tm = tensor_meta(m1, m2, weight=m1.weight + m2.weight + 2 * nu)
    comps = []
    for off in tm.offsets:
        coeffs = {n: Fraction(rng.randint(-7, 7), rng.choice([1, 2])) for n in range(precision + 1)}
        if off == 0:
            coeffs[0] = Fraction(0)
        comps.append(FourierSeries(off, coeffs, precision))
    return VVForm(tm, comps, cusp_flag=True)


# -- extraction pairing ----------------------------------------------------------


def test_extraction_value_for_weight_twelve_cusp_fixture():
    res = poincare_pairing(fixtures.delta(10), 12, 1, 1)
    assert res.value == SymbolicValue.term(Fraction(math.factorial(10), 4 ** 11), pi_pow=-11)
    assert res.formula_id == "thm2"
    assert res.tail_bound is None


def test_extraction_zero_when_exponent_vanishes():
    g = scalar_form(FourierSeries(0, {1: 5}, 6), 12, cusp_flag=True)
    assert poincare_pairing(g, 12, 0, 1).value.is_zero()


def test_extraction_power_law_under_doubling():
    g = scalar_form(FourierSeries(0, {1: 1, 2: 1}, 6), 12, cusp_flag=True)
    r1 = poincare_pairing(g, 12, 1, 1)
    r2 = poincare_pairing(g, 12, 2, 1)
    assert r2.value == r1.value * Fraction(1, 2 ** 11)


def test_extraction_fractional_weight_stays_symbolic():
    g = scalar_form(FourierSeries(Fraction(1, 4), {0: 3}, 6), Fraction(9, 2), cusp_flag=True)
    res = poincare_pairing(g, Fraction(9, 2), 0, 1)
    # gamma(7/2) folds to a rational times sqrt(pi); the 4pi(1/4) power stays
    want = SymbolicValue.term(3, gammas=[(Fraction(7, 2), 1)], pi_pow=Fraction(-7, 2), powers=[(4, Fraction(-7, 2)), (Fraction(1, 4), Fraction(-7, 2))])
    assert res.value == want


def test_extraction_validations():
    D = fixtures.delta(6)
    with pytest.raises(RcvvError):
        poincare_pairing(D, 2, 1, 1)
    with pytest.raises(MetaMismatchError):
        poincare_pairing(D, 12, 1, 2)
    with pytest.raises(MetaMismatchError):
        poincare_pairing(fixtures.e4(6), 4, 1, 1)  # not cusp


# -- bracket pairing ----------------------------------------------------------------


def test_bracket_pairing_zero_input(rng):
    m1 = MultiplierData(5, (Fraction(0),))
    m2 = MultiplierData(6, (Fraction(1, 2),))
    tm = tensor_meta(m1, m2, weight=13)
    f = VVForm(tm, (FourierSeries(Fraction(1, 2), {}, 8),), cusp_flag=True)
    g = VVForm(m1, (random_series(rng, Fraction(0), 8),))
    res = bracket_pairing(f, g, k1=5, k2=6, nu=1, s=1, r=1)
    assert res.value.is_zero()
    assert res.tail_bound == 0.0


def test_bracket_pairing_two_u_terms_for_order_one(rng):
    m1 = MultiplierData(5, (Fraction(0),))
    m2 = MultiplierData(6, (Fraction(0),))
    f = _random_tensor_cusp(rng, m1, m2, 1)
    g = VVForm(m1, (random_series(rng, Fraction(0), 8),))
    res = bracket_pairing(f, g, k1=5, k2=6, nu=1, s=1, r=1)
    assert len(res.details["u_weights"]) == 2
    u_seen = {u for (_, u, _) in res.details["contributions"]}
    assert u_seen <= {0, 1}


def test_bracket_pairing_monotone_refinement(rng):
    """Raising the precision only appends terms: contributions at indices
    inside the smaller window are unchanged."""
    m1 = MultiplierData(Fraction(7, 2), (Fraction(1, 3),))
    m2 = MultiplierData(5, (Fraction(1, 4),))
    f_full = _random_tensor_cusp(rng, m1, m2, 1, precision=12)
    g_full = VVForm(m1, (random_series(rng, Fraction(1, 3), 12),))
    f_cut = VVForm(f_full.meta, tuple(s.truncate(7) for s in f_full.components), cusp_flag=True)
    g_cut = VVForm(g_full.meta, tuple(s.truncate(7) for s in g_full.components))
    hi = bracket_pairing(f_full, g_full, k1=Fraction(7, 2), k2=5, nu=1, s=2, r=1)
    lo = bracket_pairing(f_cut, g_cut, k1=Fraction(7, 2), k2=5, nu=1, s=2, r=1)
    for key, term in lo.details["contributions"].items():
        assert hi.details["contributions"][key] == term
    assert lo.truncation_N < hi.truncation_N


def test_bracket_pairing_requires_structure(rng):
    m1 = MultiplierData(5, (Fraction(0),))
    g = VVForm(m1, (random_series(rng, Fraction(0), 6),))
    with pytest.raises(MetaMismatchError):
        bracket_pairing(g, g, k1=5, k2=6, nu=1, s=0, r=1)  # no tensor tag


def test_bracket_pairing_scalar_instance_value():
    n_max = 16
    f18 = fixtures.e6_delta(n_max)
    E4 = fixtures.e4(n_max)
    ft = as_tensor(f18, E4.meta, MultiplierData(12, (Fraction(0),)))
    res = bracket_pairing(ft, E4, k1=4, k2=12, nu=1, s=1, r=1)
    # n = 0 term: only u = 1 contributes (0^(nu-u) kills u = 0):
    #   -(1) * C(1,1) * R(4,1,0) R(12,1,1) * a(1) b(0) / 1^17 = -4
    # so the sum starts at -4 and stays a rational multiple of gamma(17)/(4pi)^17
    pref = SymbolicValue.term(1, gammas=[(17, 1)], pi_pow=-17, powers=[(4, -17)])
    ratio = res.value * pref.inverse()
    assert ratio.is_rational()
    n0_term = res.details["contributions"][(1, 1, 0)]
    assert n0_term == SymbolicValue.from_rational(-4)


# -- adjoint family ------------------------------------------------------------------


def test_adjoint_zero_input(rng):
    m1 = MultiplierData(5, (Fraction(0),))
    m2 = MultiplierData(6, (Fraction(1, 2),))
    tm = tensor_meta(m1, m2, weight=13)
    h = VVForm(tm, (FourierSeries(Fraction(1, 2), {}, 8),), cusp_flag=True)
    g = VVForm(m1, (random_series(rng, Fraction(0), 8),))
    adj = bracket_adjoint(h, g, k1=5, k2=6, nu=1)
    assert adj.is_zero()
    assert adj.form.weight == 6
    assert adj.form.cusp_flag


def test_adjoint_dual_path_consistency(rng):
    """Coefficients recovered through the extraction pairing equal the
    swap-identity route through the closed pairing formula, exactly."""
    k1, k2 = Fraction(5), Fraction(7)
    m1 = MultiplierData(k1, (Fraction(0), Fraction(1, 3)))
    m2 = MultiplierData(k2, (Fraction(0), Fraction(3, 4), Fraction(1, 2)))
    for nu in (1, 2):
        h = _random_tensor_cusp(rng, m1, m2, nu)
        g = VVForm(m1, tuple(random_series(rng, off, 8) for off in m1.offsets))
        adj = bracket_adjoint(h, g, k1=k1, k2=k2, nu=nu)
        for l in (1, 2, 3):
            for n in (1, 2, 3):
                through_extraction = poincare_pairing(adj.form, k2, n, l)
                through_formula = bracket_pairing(h, g, k1=k1, k2=k2, nu=nu, s=n, r=l)
                assert through_extraction.value == through_formula.value * Fraction((-1) ** nu)


def test_adjoint_parity_flips_global_sign(rng):
    k1, k2 = Fraction(5), Fraction(7)
    m1 = MultiplierData(k1, (Fraction(0),))
    m2 = MultiplierData(k2, (Fraction(0),))
    g = VVForm(m1, (random_series(rng, Fraction(0), 8),))
    values = {}
    for nu in (1, 2):
        h = _random_tensor_cusp(rng, m1, m2, nu)
        adj = bracket_adjoint(h, g, k1=k1, k2=k2, nu=nu)
        p = poincare_pairing(adj.form, k2, 1, 1)
        b = bracket_pairing(h, g, k1=k1, k2=k2, nu=nu, s=1, r=1)
        values[nu] = (p.value, b.value)
    assert values[1][0] == values[1][1] * Fraction(-1)
    assert values[2][0] == values[2][1]


def test_adjoint_boundary_coefficient_is_zero(rng):
    k1, k2 = Fraction(5), Fraction(7)
    m1 = MultiplierData(k1, (Fraction(0),))
    m2 = MultiplierData(k2, (Fraction(0),))
    h = _random_tensor_cusp(rng, m1, m2, 1)
    g = VVForm(m1, (random_series(rng, Fraction(0), 8),))
    adj = bracket_adjoint(h, g, k1=k1, k2=k2, nu=1)
    assert adj.form.component(1).coefficient(0) == SymbolicValue.zero()


# -- index-m routes --------------------------------------------------------------------


def test_jacobi_pairing_zero_and_scaling(rng):
    m, nu, s = 2, 1, 1
    k1, k2 = Fraction(6), Fraction(7)
    kap1, kap2 = Fraction(1, 3), Fraction(1, 4)
    g = random_theta_form(rng, m, 8, weight=k1, kappa=kap1)
    f = random_theta_form(rng, m, 8, weight=k1 + k2 + 2 * nu, kappa=(kap1 + kap2) % 1, cusp=True)
    report = jacobi_bracket_pairing(f, g, k2=k2, nu=nu, s=s, mode="both")
    # canonical equals the vector-valued value times (4m)^nu/(nu! sqrt(2m))
    gv = theta_decompose(g)
    fv = as_tensor(theta_decompose(f), gv.meta, MultiplierData(k2, (kap2,)))
    vv = bracket_pairing(fv, gv, k1=k1 - Fraction(1, 2), k2=k2, nu=nu, s=s, r=1)
    factor = SymbolicValue.term(
        Fraction((4 * m) ** nu, math.factorial(nu)), powers=[(2 * m, Fraction(-1, 2))]
    )
    assert report.canonical.value == factor * vv.value
    # the two modes differ and every comparison row carries the factor
    assert not report.identical
    assert report.rows
    assert all(row["factor"].startswith("(4*pi*") for row in report.rows)

    fz = random_theta_form(rng, m, 8, weight=k1 + k2 + 2 * nu, kappa=(kap1 + kap2) % 1, cusp=True)
    zero = type(fz)(m, fz.weight, fz.kappa, [FourierSeries(s_.offset, {}, 8) for s_ in fz.components], cusp_flag=True)
    rep0 = jacobi_bracket_pairing(zero, g, k2=k2, nu=nu, s=s, mode="canonical")
    assert rep0.value.is_zero()


def test_jacobi_pairing_index_mismatch(rng):
    g = random_theta_form(rng, 1, 6, weight=Fraction(6))
    f = random_theta_form(rng, 2, 6, weight=Fraction(15), cusp=True)
    with pytest.raises(MetaMismatchError):
        jacobi_bracket_pairing(f, g, k2=7, nu=1, s=0)


def test_jacobi_adjoint_modes_agree(rng):
    m, nu = 2, 1
    k1, k2 = Fraction(5), Fraction(7)
    kap1, kap2 = Fraction(1, 4), Fraction(1, 3)
    g = scalar_form(random_series(rng, kap1, 8), k1)
    h = random_theta_form(rng, m, 8, weight=k1 + k2 + 2 * nu, kappa=(kap1 + kap2) % 1, cusp=True)
    report = jacobi_bracket_adjoint(h, g, k2=k2, nu=nu, mode="both")
    assert report.identical
    assert report.canonical.form.weight == k2
    assert report.canonical.form.kappa == kap2
    # zero input maps to zero
    zero = type(h)(m, h.weight, h.kappa, [FourierSeries(s.offset, {}, 8) for s in h.components], cusp_flag=True)
    rep0 = jacobi_bracket_adjoint(zero, g, k2=k2, nu=nu, mode="canonical")
    assert rep0.is_zero()


def test_skew_pairing_zero_scaling_and_conjugation(rng):
    m, nu, s = 1, 2, 0
    k1, k2 = Fraction(6), Fraction(13, 2)
    kap1, kap2 = Fraction(1, 2), Fraction(1, 3)
    g = random_skew_form(rng, m, 8, weight=k1, kappa=kap1)
    f = random_skew_form(rng, m, 8, weight=k1 + k2 + 2 * nu, kappa=(kap1 - kap2) % 1, cusp=True)
    report = skew_bracket_pairing(f, g, k2=k2, nu=nu, s=s, mode="both")
    gv = skew_theta_decompose(g)
    fv = as_tensor(skew_theta_decompose(f), gv.meta, MultiplierData(k2, (kap2,)))
    vv = bracket_pairing(fv, gv, k1=k1 - Fraction(1, 2), k2=k2, nu=nu, s=s, r=1)
    factor = SymbolicValue.term(
        Fraction(1, math.factorial(nu)), powers=[(2 * m, Fraction(-1, 2))]
    )
    # no (4m)^nu appears; the value is the conjugated vector-valued one
    assert report.canonical.value == factor * vv.value.conjugate()
    assert not report.identical


def test_skew_adjoint_modes_agree(rng):
    m, nu = 1, 1
    k1, k2 = Fraction(5), Fraction(15, 2)
    kap1, kap2 = Fraction(0), Fraction(1, 4)
    g = scalar_form(random_series(rng, kap1, 8), k1)
    h = random_skew_form(rng, m, 8, weight=k1 + k2 + 2 * nu, kappa=(kap2 - kap1) % 1, cusp=True)
    report = skew_bracket_adjoint(h, g, k2=k2, nu=nu, mode="both")
    assert report.identical
    assert report.canonical.form.weight == k2
    assert report.canonical.form.kappa == kap2


def test_route_weight_preconditions(rng):
    g = random_theta_form(rng, 1, 6, weight=Fraction(5, 2))
    f = random_theta_form(rng, 1, 6, weight=Fraction(5, 2) + 7 + 2, cusp=True)
    with pytest.raises(RcvvError):
        jacobi_bracket_pairing(f, g, k2=7, nu=1, s=0)


# -- float backend -------------------------------------------------------------------


def test_float_backend_pairing_matches_exact_numeric(rng):
    from rcvv.qseries import to_float

    k1, k2, nu, s = Fraction(5), Fraction(7), 1, 1
    m1 = MultiplierData(k1, (Fraction(0), Fraction(1, 3)))
    m2 = MultiplierData(k2, (Fraction(0), Fraction(1, 2)))
    f = _random_tensor_cusp(rng, m1, m2, nu)
    g = VVForm(m1, tuple(random_series(rng, off, 8) for off in m1.offsets))
    exact = bracket_pairing(f, g, k1=k1, k2=k2, nu=nu, s=s, r=2)
    ff = VVForm(f.meta, tuple(to_float(series) for series in f.components), cusp_flag=True)
    gf = VVForm(g.meta, tuple(to_float(series) for series in g.components))
    floated = bracket_pairing(ff, gf, k1=k1, k2=k2, nu=nu, s=s, r=2)
    want = complex(exact.value.evaluate(113))
    assert abs(complex(floated.value) - want) <= 1e-12 * max(1.0, abs(want))
    # extraction pairing as well
    pf = poincare_pairing(ff, k1 + k2 + 2 * nu, 1, 1)
    pe = poincare_pairing(f, k1 + k2 + 2 * nu, 1, 1)
    want = complex(pe.value.evaluate(113))
    assert abs(complex(pf.value) - want) <= 1e-12 * max(1.0, abs(want))


def test_float_backend_bracket_matches_exact(rng):
    from rcvv.qseries import to_float
    from rcvv.vvforms import rc_bracket

    f1 = random_vvform(rng, 2, 5)
    f2 = random_vvform(rng, 1, 5)
    exact = rc_bracket(f1, f2, 2)
    floated = rc_bracket(
        VVForm(f1.meta, tuple(to_float(s) for s in f1.components)),
        VVForm(f2.meta, tuple(to_float(s) for s in f2.components)),
        2,
    )
    for j in range(1, exact.dim + 1):
        for n, c in exact.component(j).items():
            got = complex(floated.component(j).coefficient(n))
            want = float(c)
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))
