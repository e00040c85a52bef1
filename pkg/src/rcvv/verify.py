"""Randomised and numeric verification suites.

Each suite returns a machine-readable report dict with a ``passed`` flag
and per-instance rows; the command-line ``verify`` subcommand serialises
these and maps failures to its exit-code contract.  All randomness flows
through a seeded ``random.Random``, so reports are reproducible (timing
fields aside).
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

from .errors import RcvvError
from .fixtures import delta, delta_e4, e4, e6_delta
from .jacobi import ThetaComponentForm, component_offset, jacobi_rc_bracket, theta_decompose
from .qseries import FourierSeries, agree_up_to
from .skewjacobi import (
    SkewThetaForm,
    skew_component_offset,
    skew_rc_bracket,
    skew_theta_decompose,
)
from .vvforms import MultiplierData, VVForm, rc_bracket, scalar_form, swap_slots, vv_scale

__all__ = [
    "random_fraction",
    "random_weight",
    "random_offsets",
    "random_series",
    "random_vvform",
    "random_theta_form",
    "random_skew_form",
    "run_suite",
    "SUITES",
]

_OFFSET_POOL = [
    Fraction(0),
    Fraction(1, 2),
    Fraction(1, 3),
    Fraction(2, 3),
    Fraction(1, 4),
    Fraction(3, 4),
]


def random_fraction(rng, span=9, dens=(1, 2, 3)):
    return Fraction(rng.randint(-span, span), rng.choice(dens))


def random_weight(rng):
    """A rational weight in (2, 20]."""
    den = rng.choice((1, 2, 3, 4))
    return 2 + Fraction(rng.randint(1, 18 * den), den)


def random_offsets(rng, dim):
    return tuple(rng.choice(_OFFSET_POOL) for _ in range(dim))


def random_series(rng, offset, precision, cusp=False):
    coeffs = {n: random_fraction(rng) for n in range(precision + 1)}
    if cusp and offset == 0:
        coeffs[0] = Fraction(0)
    return FourierSeries(offset, coeffs, precision)


def random_vvform(rng, dim, precision, weight=None, cusp=False):
    meta = MultiplierData(
        weight if weight is not None else random_weight(rng),
        random_offsets(rng, dim),
    )
    comps = tuple(random_series(rng, off, precision, cusp=cusp) for off in meta.offsets)
    return VVForm(meta, comps, cusp_flag=cusp)


def random_theta_form(rng, m, precision, weight=None, kappa=None, cusp=False):
    kappa = rng.choice(_OFFSET_POOL) if kappa is None else Fraction(kappa)
    weight = random_weight(rng) if weight is None else Fraction(weight)
    comps = [
        random_series(rng, component_offset(m, mu, kappa), precision, cusp=cusp)
        for mu in range(1, 2 * m + 1)
    ]
    return ThetaComponentForm(m, weight, kappa, comps, cusp_flag=cusp)


def random_skew_form(rng, m, precision, weight=None, kappa=None, cusp=False):
    kappa = rng.choice(_OFFSET_POOL) if kappa is None else Fraction(kappa)
    weight = random_weight(rng) if weight is None else Fraction(weight)
    comps = [
        random_series(rng, skew_component_offset(m, mu, kappa), precision, cusp=cusp)
        for mu in range(1, 2 * m + 1)
    ]
    return SkewThetaForm(m, weight, kappa, comps, cusp_flag=cusp)


# ---------------------------------------------------------------------------
# exact suites


def suite_cuspidality(seed: int, count: int = 100) -> dict:
    """Brackets of random pairs land in the cusp space: every coefficient at
    total exponent 0 vanishes.  Exact check; the bracket constructor already
    raises on violation, so the suite doubles as a crash test."""
    import random

    rng = random.Random(seed)
    failures = []
    for i in range(count):
        d1, d2 = rng.randint(1, 3), rng.randint(1, 3)
        nu = rng.randint(1, 3)
        f1 = random_vvform(rng, d1, 6)
        f2 = random_vvform(rng, d2, 6)
        try:
            out = rc_bracket(f1, f2, nu)
        except RcvvError as exc:
            failures.append({"instance": i, "error": str(exc)})
            continue
        for slot, series in enumerate(out.components):
            if series.offset == 0 and series.coeffs.get(0):
                failures.append({"instance": i, "slot": slot})
    return _report("thm1", seed, count, failures)


def suite_swap(seed: int, count: int = 100) -> dict:
    """bracket(f1, f2) equals (-1)^nu times the slot-swapped bracket
    (f2, f1), coefficientwise and exactly."""
    import random

    rng = random.Random(seed)
    failures = []
    for i in range(count):
        nu = rng.choice((1, 2, 3))
        f1 = random_vvform(rng, rng.randint(1, 3), 6)
        f2 = random_vvform(rng, rng.randint(1, 3), 6)
        lhs = rc_bracket(f1, f2, nu)
        rhs = vv_scale(swap_slots(rc_bracket(f2, f1, nu)), Fraction((-1) ** nu))
        ok = all(
            agree_up_to(lhs.component(j), rhs.component(j))
            for j in range(1, lhs.dim + 1)
        )
        if not ok:
            failures.append({"instance": i, "nu": nu})
    return _report("swap", seed, count, failures)


def suite_theta_compat(seed: int, count: int = 25) -> dict:
    """Decomposing the extended holomorphic bracket reproduces, after the
    (4m)^nu rescale, 1/nu! times the vector-valued bracket of the
    decomposition; boundary coefficients of the bracket vanish."""
    import random

    rng = random.Random(seed)
    failures = []
    instances = 0
    for m in (1, 2, 3):
        for nu in (1, 2):
            for i in range(count):
                instances += 1
                f = random_theta_form(rng, m, 6)
                g = scalar_form(
                    random_series(rng, rng.choice(_OFFSET_POOL), 6), random_weight(rng)
                )
                bracket = jacobi_rc_bracket(f, g, nu)
                lhs = vv_scale(theta_decompose(bracket), Fraction(1, (4 * m) ** nu))
                rhs = vv_scale(
                    rc_bracket(theta_decompose(f), g, nu),
                    Fraction(1, math.factorial(nu)),
                )
                ok = all(
                    agree_up_to(lhs.component(j), rhs.component(j))
                    for j in range(1, 2 * m + 1)
                )
                boundary_ok = all(
                    series.coeffs.get(0) is None
                    for series in bracket.components
                    if series.offset == 0
                )
                if not (ok and boundary_ok and bracket.cusp_flag):
                    failures.append({"m": m, "nu": nu, "instance": i})
    return _report("thm7", seed, instances, failures)


def suite_skew_compat(seed: int, count: int = 25) -> dict:
    """Skew analogue: the decomposition of the skew bracket equals 1/nu!
    times the vector-valued bracket with NO index-power rescale; the
    absence of the (4m)^nu factor is pinned as a regression."""
    import random

    rng = random.Random(seed)
    failures = []
    instances = 0
    for m in (1, 2, 3):
        for nu in (1, 2):
            for i in range(count):
                instances += 1
                f = random_skew_form(rng, m, 6)
                g = scalar_form(
                    random_series(rng, rng.choice(_OFFSET_POOL), 6), random_weight(rng)
                )
                bracket = skew_rc_bracket(f, g, nu)
                lhs = skew_theta_decompose(bracket)
                rhs = vv_scale(
                    rc_bracket(skew_theta_decompose(f), g, nu),
                    Fraction(1, math.factorial(nu)),
                )
                ok = all(
                    agree_up_to(lhs.component(j), rhs.component(j))
                    for j in range(1, 2 * m + 1)
                )
                # regression: applying the holomorphic-case rescale must break
                # the identity whenever the bracket is nonzero
                wrong = vv_scale(lhs, Fraction(1, (4 * m) ** nu))
                scale_differs = lhs.is_zero() or any(
                    not agree_up_to(wrong.component(j), rhs.component(j))
                    for j in range(1, 2 * m + 1)
                )
                if not (ok and scale_differs and bracket.cusp_flag):
                    failures.append({"m": m, "nu": nu, "instance": i})
    return _report("thm8", seed, instances, failures)


# ---------------------------------------------------------------------------
# numeric suites


def suite_extraction_numeric(seed: int = 0, tolerance: float = 1e-2, spec=None) -> dict:
    """Quadrature over the fundamental domain reproduces the closed-form
    extraction pairing for (k, s) in {(12,1), (12,2), (16,1)}."""
    from . import numcheck, pairing

    spec = spec or numcheck.QuadratureSpec(depth=1, c_cutoff=25, d_cutoff=35)
    rows = []
    failures = []
    for k, s in ((12, 1), (12, 2), (16, 1)):
        t0 = time.time()
        g = delta(20) if k == 12 else delta_e4(20)
        g_ev = numcheck.series_evaluator(g)

        def f_call(taus, k=k, s=s):
            return numcheck.poincare_batch(k, s, taus, spec)

        res = numcheck.petersson_integral(
            (f_call, g_ev), k, spec, decay_rate=2 * math.pi * (s + 1), tolerance=tolerance
        )
        formula = float(pairing.poincare_pairing(g, k, s, 1).value.evaluate(80))
        rel = abs(res.value - formula) / abs(formula)
        row = {
            "k": k,
            "s": s,
            "numeric": [res.value.real, res.value.imag],
            "formula": formula,
            "rel_err": rel,
            "tolerance": tolerance,
            "error_estimate": res.error,
            "runtime_sec": time.time() - t0,
        }
        rows.append(row)
        if not rel <= tolerance:
            failures.append(row)
    report = _report("thm2num", seed, len(rows), failures)
    report["rows"] = rows
    return report


def suite_bracket_numeric(seed: int = 0, tolerance: float = 5e-2, spec=None) -> dict:
    """Quadrature of the pairing against the bracket with the extraction
    series, for the scalar instance (k1, k2, nu, s) = (4, 12, 1, 1) with the
    normalised weight-18 cusp fixture; compares against the closed-form
    truncated sum and reports the truncation tail data."""
    from . import numcheck, pairing
    from .vvforms import as_tensor

    spec = spec or numcheck.QuadratureSpec(depth=1, c_cutoff=50, d_cutoff=40)
    if spec.c_cutoff < 50:
        raise RcvvError("this suite requires a coset cutoff of at least 50")
    t0 = time.time()
    precision = 31
    f18 = e6_delta(precision)
    g4 = e4(precision)
    f_ev = numcheck.series_evaluator(f18)
    g_ev = numcheck.series_evaluator(g4)
    gd_ev = numcheck.series_evaluator(g4, derivative=1)

    def bracket_ev(taus):
        P, P1 = numcheck.poincare_batch(12, 1, taus, spec, order=1)
        return 12 * gd_ev(taus) * P - 4 * g_ev(taus) * P1

    bracket_ev.min_exponent = 1.0
    res = numcheck.petersson_integral(
        (f_ev, bracket_ev), 18, spec, decay_rate=2 * math.pi * 2, tolerance=tolerance
    )
    exact = pairing.bracket_pairing(
        as_tensor(f18, g4.meta, MultiplierData(Fraction(12), (Fraction(0),))),
        g4,
        k1=4,
        k2=12,
        nu=1,
        s=1,
        r=1,
    )
    formula = float(exact.numeric(80))
    rel = abs(res.value - formula) / abs(formula)
    row = {
        "k1": 4,
        "k2": 12,
        "nu": 1,
        "s": 1,
        "numeric": [res.value.real, res.value.imag],
        "formula": formula,
        "rel_err": rel,
        "tolerance": tolerance,
        "error_estimate": res.error,
        "truncation_N": exact.truncation_N,
        "tail_bound": exact.tail_bound,
        "tail_over_partial": exact.tail_bound / abs(formula),
        "runtime_sec": time.time() - t0,
    }
    failures = [] if rel <= tolerance else [row]
    report = _report("thm3num", seed, 1, failures)
    report["rows"] = [row]
    return report


def _report(suite: str, seed: int, count: int, failures: list) -> dict:
    return {
        "schema": "rcvv-verify-report/1",
        "suite": suite,
        "seed": seed,
        "count": count,
        "failures": failures,
        "passed": not failures,
    }


SUITES = {
    "thm1": suite_cuspidality,
    "swap": suite_swap,
    "thm7": suite_theta_compat,
    "thm8": suite_skew_compat,
    "thm2num": suite_extraction_numeric,
    "thm3num": suite_bracket_numeric,
}


def run_suite(name: str, seed: int = 0, **kwargs) -> dict:
    if name not in SUITES:
        raise RcvvError("unknown suite %r; choose from %s" % (name, sorted(SUITES)))
    t0 = time.time()
    report = SUITES[name](seed, **kwargs)
    report["runtime_sec"] = time.time() - t0
    return report
