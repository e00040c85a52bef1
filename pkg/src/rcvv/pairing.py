"""Closed-form Petersson pairings and adjoint coefficient families, as
exact truncated sums over stored Fourier coefficients.

Exact-backend values are :class:`~rcvv.symbolic.SymbolicValue` products of
a rational, gamma factors, and pi/radical powers, so desk-scale identities
can be asserted with ``==``.  Float-backend forms evaluate the same sums in
mpmath arithmetic.

Each n-sum over the integers is truncated to the window where both
coefficient lookups are trusted; every result caused by such a truncation
carries a ``tail_bound`` computed from a crude empirical growth envelope
(max-ratio fit of |a(e)| / e^beta over the stored coefficients, beta =
(weight-1)/2 for cusp forms and weight-1 otherwise), folded through an
integral comparison.  The bound is honest but deliberately unsophisticated;
the sums at hand decay polynomially with a large exponent.

The theta-route pairings are computed twice on request: the ``canonical``
mode routes through the theta decomposition and the vector-valued formula
with the compatibility scaling, while the ``as-printed`` mode evaluates the
displayed index-m formulas verbatim.  For the pairing formulas the two
modes differ per term by (4*pi*E)^(-1/2) in the exponent bookkeeping (E the
coefficient exponent); for the adjoint families they agree.  Reports carry
both values and the per-term factors rather than silently choosing one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import (
    BackendMismatchError,
    InternalConsistencyError,
    MetaMismatchError,
    RcvvError,
)
from .jacobi import (
    ThetaComponentForm,
    component_offset,
    theta_decompose,
    theta_recompose,
)
from .qseries import FLOAT, RATIONAL, SYMBOLIC, FourierSeries
from .skewjacobi import (
    SkewThetaForm,
    skew_component_offset,
    skew_theta_decompose,
    skew_theta_recompose,
)
from .symbolic import SymbolicValue
from .vvforms import (
    MultiplierData,
    VVForm,
    as_tensor,
    gamma_ratio,
    vv_scale,
)

__all__ = [
    "PairingResult",
    "AdjointResult",
    "DualModeReport",
    "poincare_pairing",
    "bracket_pairing",
    "bracket_adjoint",
    "jacobi_bracket_pairing",
    "jacobi_bracket_adjoint",
    "skew_bracket_pairing",
    "skew_bracket_adjoint",
]


@dataclass
class PairingResult:
    """Value of one pairing formula plus truncation metadata."""

    value: object
    truncation_N: int
    tail_bound: object
    formula_id: str
    details: dict | None = None

    def numeric(self, prec: int | None = None):
        if isinstance(self.value, SymbolicValue):
            return self.value.evaluate(prec)
        return self.value


@dataclass
class AdjointResult:
    """Adjoint coefficient family assembled as a form, with per-coefficient
    truncation-tail bounds keyed by (component, index)."""

    form: object
    tail_bounds: dict
    formula_id: str

    def is_zero(self) -> bool:
        return self.form.is_zero()


@dataclass
class DualModeReport:
    """Canonical and as-printed evaluations side by side.

    ``rows`` lists the per-term comparison: for each contributing term the
    two values and the exact symbolic factor relating them.  ``identical``
    records whether the two total values agree exactly.
    """

    canonical: object
    as_printed: object
    rows: list = field(default_factory=list)
    identical: bool = False
    note: str = ""


# ---------------------------------------------------------------------------
# shared helpers


def _is_exact(backend: str) -> bool:
    return backend in (RATIONAL, SYMBOLIC)


def _conj(value, backend):
    if backend == FLOAT:
        return mpmath.conj(value)
    if isinstance(value, SymbolicValue):
        return value.conjugate()
    return value


def _as_sym(value) -> SymbolicValue:
    if isinstance(value, SymbolicValue):
        return value
    return SymbolicValue.from_rational(value)


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _lookup_by_exponent(series: FourierSeries, exponent: Fraction):
    """(coefficient, trusted) at a true exponent value.

    Non-slot exponents (offset mismatch) are trusted zeros; slots beyond
    the precision bound are untrusted and report (0, False).
    """
    idx = Fraction(exponent) - series.offset
    if idx.denominator != 1:
        return 0, True
    idx = int(idx)
    if idx > series.precision:
        return 0, False
    if idx < 0:
        return 0, True
    return series.coeffs.get(idx, 0), True


def _abs_num(value) -> float:
    if isinstance(value, SymbolicValue):
        return abs(float(value.evaluate()))
    if isinstance(value, (mpmath.mpc, mpmath.mpf)):
        return float(abs(value))
    return abs(float(value))


def _growth_envelope(components, weight: Fraction, cusp: bool):
    """(C, beta) with |a(e)| <= C * e^beta fitted over stored coefficients."""
    beta = float(weight - 1) / 2 if cusp else float(weight - 1)
    cmax = 0.0
    for series in components:
        for n, c in series.coeffs.items():
            e = float(n + series.offset)
            if e <= 0:
                continue
            cmax = max(cmax, _abs_num(c) / e ** beta)
    return cmax, beta


def _tail_integral(first_base: float, t: float) -> float:
    """Bound on sum_{n>=M} E_n^t for increasing bases starting at
    ``first_base``: first term plus the integral comparison.  Infinite when
    the exponent does not decay."""
    if t >= -1:
        return math.inf
    if first_base <= 0:
        return math.inf
    return first_base ** t * (1 + first_base / (-1 - t))


def _u_weight(k1: Fraction, k2: Fraction, nu: int, u: int, shift: Fraction) -> Fraction:
    """(-(shift))^u C(nu,u) gamma(k1+nu)gamma(k2+nu) /
    (gamma(k1+nu-u)gamma(k2+u)) as an exact rational."""
    return (
        (-shift) ** u
        * Fraction(math.comb(nu, u))
        * gamma_ratio(k1, nu, nu - u)
        * gamma_ratio(k2, nu, u)
    )


def _require_pairing_meta(f: VVForm, g: VVForm, k1, k2, nu: int):
    """Common validation for the tensor-side pairing formulas."""
    if f.meta.factors is None:
        raise MetaMismatchError("pairing requires a tensor-tagged first form")
    meta1, meta2 = f.meta.factors
    k1 = Fraction(k1)
    k2 = Fraction(k2)
    if g.meta.offsets != meta1.offsets:
        raise MetaMismatchError("second form offsets do not match the first tensor factor")
    if g.weight != k1 or meta1.weight != k1:
        raise MetaMismatchError("weight k1=%s does not match the forms" % k1)
    if meta2.weight != k2:
        raise MetaMismatchError("weight k2=%s does not match the tensor factor" % k2)
    if f.weight != k1 + k2 + 2 * nu:
        raise MetaMismatchError("first form weight must be k1+k2+2nu")
    if not f.cusp_flag:
        raise MetaMismatchError("pairing requires a cusp form on the tensor side")
    if k1 <= 2 or k2 <= 2:
        raise RcvvError("pairing formulas need both weights > 2")
    if f.backend != g.backend:
        raise BackendMismatchError("pairing operands carry different backends")
    # dual-offset identity: for diagonal unitary translation action the
    # dual side carries the same offsets as the primal side, so the stored
    # offsets must be exactly the folded factor offsets.
    for j in range(1, meta1.dim + 1):
        for l in range(1, meta2.dim + 1):
            want = (meta1.offsets[j - 1] + meta2.offsets[l - 1]) % 1
            if f.meta.offsets[f.meta.slot_index(j, l)] != want:
                raise InternalConsistencyError("dual-side offsets diverge from primal")
    return meta1, meta2


# ---------------------------------------------------------------------------
# coefficient-extraction pairing (formula tag "thm2")


def poincare_pairing(g: VVForm, k, s: int, u: int) -> PairingResult:
    """Pairing of the coefficient-extraction series of parameters (k, s, u)
    against a cusp form g: conj(b_u(s + kappa_u)) * gamma(k-1) /
    (4 pi (s+kappa_u))^(k-1), and exactly zero when s + kappa_u = 0."""
    k = Fraction(k)
    s = int(s)
    if k <= 2:
        raise RcvvError("extraction pairing needs weight > 2, got %s" % k)
    if k != g.weight:
        raise MetaMismatchError("weight %s does not match the form's %s" % (k, g.weight))
    if not 1 <= u <= g.dim:
        raise MetaMismatchError("component %d out of range 1..%d" % (u, g.dim))
    if s < 0:
        raise RcvvError("need s >= 0")
    if not g.cusp_flag:
        raise MetaMismatchError("extraction pairing is defined against cusp forms")
    series = g.component(u)
    kappa = series.offset
    if s + kappa == 0:
        zero = mpmath.mpc(0) if g.backend == FLOAT else SymbolicValue.zero()
        return PairingResult(zero, series.precision, None, "thm2")
    b = series.coefficient(s)
    e = s + kappa
    if g.backend == FLOAT:
        value = mpmath.conj(b) * mpmath.gamma(_mpf(k) - 1) / (4 * mpmath.pi * _mpf(e)) ** (_mpf(k) - 1)
        return PairingResult(value, series.precision, None, "thm2")
    factor = SymbolicValue.term(
        1,
        gammas=[(k - 1, 1)],
        pi_pow=-(k - 1),
        powers=[(4, -(k - 1)), (e, -(k - 1))],
    )
    value = _as_sym(_conj(b, g.backend)) * factor
    return PairingResult(value, series.precision, None, "thm2")


# ---------------------------------------------------------------------------
# cusp form against bracket-with-extraction-series (formula tag "thm3")


def bracket_pairing(f: VVForm, g: VVForm, *, k1, k2, nu: int, s: int, r: int) -> PairingResult:
    """Pairing of a tensor-side cusp form f against the order-nu bracket of
    g with the coefficient-extraction series of parameters (k2, s, slot r).

    Implements the closed double sum: prefactor gamma(K)/(4 pi)^K with
    K = k1+k2+2nu-1, inner weights over u in 0..nu, and for each first-slot
    component j the n-sum of

        (n+kappa_{1,j})^(nu-u) a_{j,r}(E) conj(b_j(n+kappa_{1,j})) / E^K,

    E = s+n+kappa_{1,j}+kappa_{2,r}, truncated to the trusted window.
    """
    nu = int(nu)
    s = int(s)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1")
    if s < 0:
        raise RcvvError("need s >= 0")
    meta1, meta2 = _require_pairing_meta(f, g, k1, k2, nu)
    k1 = Fraction(k1)
    k2 = Fraction(k2)
    if not 1 <= r <= meta2.dim:
        raise MetaMismatchError("slot r=%d out of range 1..%d" % (r, meta2.dim))
    K = k1 + k2 + 2 * nu - 1
    kappa2r = meta2.offsets[r - 1]
    exact = _is_exact(f.backend)

    u_weights = [_u_weight(k1, k2, nu, u, s + kappa2r) for u in range(nu + 1)]

    contributions = {}
    windows = {}
    for j in range(1, meta1.dim + 1):
        kappa1j = meta1.offsets[j - 1]
        slot = f.component(f.meta.slot_index(j, r) + 1)
        gj = g.component(j)
        carry = f.meta.carry(j, r)
        n_hi = min(gj.precision, slot.precision - s - carry)
        windows[j] = (0, n_hi)
        for n in range(0, n_hi + 1):
            b = gj.coeffs.get(n, 0)
            if b == 0:
                continue
            E = s + n + kappa1j + kappa2r
            a, trusted = _lookup_by_exponent(slot, E)
            if not trusted:
                raise InternalConsistencyError("window bound misses an untrusted slot")
            if a == 0:
                continue
            if E == 0:
                raise InternalConsistencyError(
                    "nonzero cusp coefficient at exponent zero"
                )
            for u in range(nu + 1):
                w = u_weights[u] * (n + kappa1j) ** (nu - u)
                if w == 0:
                    continue
                if exact:
                    term = (
                        _as_sym(a)
                        * _as_sym(_conj(b, g.backend))
                        * SymbolicValue.term(w, powers=[(E, -K)])
                    )
                else:
                    term = a * mpmath.conj(b) * _mpf(w) * mpmath.power(_mpf(E), -_mpf(K))
                contributions[(j, u, n)] = term

    if exact:
        pref = SymbolicValue.term(1, gammas=[(K, 1)], pi_pow=-K, powers=[(4, -K)])
        total = SymbolicValue.zero()
        for term in contributions.values():
            total = total + term
        value = pref * total
    else:
        pref = mpmath.gamma(_mpf(K)) / (4 * mpmath.pi) ** _mpf(K)
        value = pref * mpmath.fsum(contributions.values(), absolute=False)

    tail = _bracket_tail(f, g, meta1, meta2, k1, k2, nu, s, r, u_weights, windows, K)
    trunc_N = min(w[1] for w in windows.values())
    details = {
        "windows": windows,
        "contributions": contributions,
        "prefactor": pref,
        "u_weights": u_weights,
    }
    return PairingResult(value, trunc_N, tail, "thm3", details)


def _bracket_tail(f, g, meta1, meta2, k1, k2, nu, s, r, u_weights, windows, K):
    """Envelope bound on the omitted n-tail, at the value scale."""
    c_f, beta_f = _growth_envelope(f.components, f.weight, True)
    c_g, beta_g = _growth_envelope(g.components, g.weight, g.cusp_flag)
    if c_f == 0 or c_g == 0:
        return 0.0
    kappa2r = float(meta2.offsets[r - 1])
    total = 0.0
    for j in range(1, meta1.dim + 1):
        kappa1j = float(meta1.offsets[j - 1])
        m_first = windows[j][1] + 1
        for u in range(nu + 1):
            t = (nu - u) + beta_g + beta_f - float(K)
            first_base = s + m_first + kappa1j + kappa2r
            total += abs(float(u_weights[u])) * _tail_integral(first_base, t)
    pref = math.gamma(float(K)) / (4 * math.pi) ** float(K)
    return pref * c_f * c_g * total


# ---------------------------------------------------------------------------
# adjoint coefficient family (formula tag "thm4")


def bracket_adjoint(h: VVForm, g: VVForm, *, k1, k2, nu: int) -> AdjointResult:
    """Coefficient family of the pairing-adjoint of f -> bracket(f, g).

    For each second-factor slot l and index n the coefficient is

        (-1)^nu (4 pi (n+kappa_{2,l}))^(k2-1) gamma(K) /
        ((4 pi)^K gamma(k2-1)) * sum_u sum_j sum_t ...,

    with the same inner structure as the pairing sum; the 4-pi powers are
    combined symbolically so the exact backend keeps a closed product per
    coefficient.  The assembled form lives on the second factor meta with
    the weight k2 and is cuspidal by construction.
    """
    nu = int(nu)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1")
    meta1, meta2 = _require_pairing_meta(h, g, k1, k2, nu)
    k1 = Fraction(k1)
    k2 = Fraction(k2)
    K = k1 + k2 + 2 * nu - 1
    exact = _is_exact(h.backend)
    sign = Fraction((-1) ** nu)

    c_h, beta_h = _growth_envelope(h.components, h.weight, True)
    c_g, beta_g = _growth_envelope(g.components, g.weight, g.cusp_flag)
    pref_num = math.gamma(float(K)) / (4 * math.pi) ** float(K) / math.gamma(float(k2) - 1)

    comps = []
    tails = {}
    for l in range(1, meta2.dim + 1):
        kappa2l = meta2.offsets[l - 1]
        n_out = min(
            h.component(h.meta.slot_index(j, l) + 1).precision - h.meta.carry(j, l)
            for j in range(1, meta1.dim + 1)
        )
        coeffs = {}
        for n in range(0, n_out + 1):
            e_out = n + kappa2l
            if e_out == 0:
                continue  # boundary coefficient of a cusp family is zero
            u_weights = [_u_weight(k1, k2, nu, u, e_out) for u in range(nu + 1)]
            if exact:
                acc = SymbolicValue.zero()
            else:
                acc = mpmath.mpc(0)
            tail_total = 0.0
            for j in range(1, meta1.dim + 1):
                kappa1j = meta1.offsets[j - 1]
                slot = h.component(h.meta.slot_index(j, l) + 1)
                gj = g.component(j)
                carry = h.meta.carry(j, l)
                t_hi = min(gj.precision, slot.precision - n - carry)
                for t in range(0, t_hi + 1):
                    b = gj.coeffs.get(t, 0)
                    if b == 0:
                        continue
                    E = n + t + kappa1j + kappa2l
                    a, trusted = _lookup_by_exponent(slot, E)
                    if not trusted:
                        raise InternalConsistencyError("window bound misses an untrusted slot")
                    if a == 0:
                        continue
                    for u in range(nu + 1):
                        w = u_weights[u] * (t + kappa1j) ** (nu - u)
                        if w == 0:
                            continue
                        if exact:
                            acc = acc + (
                                _as_sym(a)
                                * _as_sym(_conj(b, g.backend))
                                * SymbolicValue.term(w, powers=[(E, -K)])
                            )
                        else:
                            acc += a * mpmath.conj(b) * _mpf(w) * mpmath.power(_mpf(E), -_mpf(K))
                if c_h and c_g:
                    for u in range(nu + 1):
                        t_exp = (nu - u) + beta_g + beta_h - float(K)
                        first_base = n + (t_hi + 1) + float(kappa1j) + float(kappa2l)
                        tail_total += abs(float(u_weights[u])) * _tail_integral(first_base, t_exp)
            if exact:
                prefactor = SymbolicValue.term(
                    sign,
                    gammas=[(K, 1), (k2 - 1, -1)],
                    pi_pow=(k2 - 1) - K,
                    powers=[(4, (k2 - 1) - K), (e_out, k2 - 1)],
                )
                coeff = prefactor * acc
                if not coeff.is_zero():
                    coeffs[n] = coeff
            else:
                prefactor = (
                    _mpf(sign)
                    * (4 * mpmath.pi * _mpf(e_out)) ** (_mpf(k2) - 1)
                    * mpmath.gamma(_mpf(K))
                    / (4 * mpmath.pi) ** _mpf(K)
                    / mpmath.gamma(_mpf(k2) - 1)
                )
                coeff = prefactor * acc
                if coeff != 0:
                    coeffs[n] = coeff
            tails[(l, n)] = pref_num * float(e_out) ** (float(k2) - 1) * (4 * math.pi) ** (float(k2) - 1) * c_h * c_g * tail_total
        backend = FLOAT if h.backend == FLOAT else SYMBOLIC
        comps.append(FourierSeries(kappa2l, coeffs, n_out, backend))
    out_meta = MultiplierData(k2, meta2.offsets)
    form = VVForm(out_meta, comps, cusp_flag=True)
    return AdjointResult(form, tails, "thm4")


# ---------------------------------------------------------------------------
# index-m pairings routed through the theta decomposition
# (formula tags "thm9" / "prop2" and skew "thm10" / "thm11")


def _scalar_meta(weight: Fraction, offset: Fraction) -> MultiplierData:
    return MultiplierData(weight, (offset,))


def _ratio_string(E: Fraction) -> str:
    return "(4*pi*%s)^(-1/2)" % E


def _row_value(v):
    if isinstance(v, SymbolicValue):
        return v.as_string()
    return complex(v)


def jacobi_bracket_pairing(
    f: ThetaComponentForm,
    g: ThetaComponentForm,
    *,
    k2,
    nu: int,
    s: int,
    mode: str = "both",
):
    """Pairing of an index-m cusp form f of weight k1+k2+2nu against the
    extended bracket of g (weight k1) with the scalar coefficient-extraction
    series of weight k2 and shift s.

    canonical mode: decompose both forms, apply the vector-valued pairing
    with weights (k1 - 1/2, k2), and scale by (4m)^nu / (nu! sqrt(2m)).

    as-printed mode: evaluate the displayed index-m double sum verbatim
    (denominator exponent k1+k2+2nu-1 and matching 4-pi power).  The two
    differ per term by (4*pi*E)^(-1/2); both are reported.
    """
    nu = int(nu)
    s = int(s)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1")
    if f.index != g.index:
        raise MetaMismatchError("index mismatch: %d vs %d" % (f.index, g.index))
    m = f.index
    k1 = g.weight
    k2 = Fraction(k2)
    if f.weight != k1 + k2 + 2 * nu:
        raise MetaMismatchError("first form weight must be k1+k2+2nu")
    if not f.cusp_flag:
        raise MetaMismatchError("pairing requires a cusp form")
    if k1 - Fraction(1, 2) <= 2 or k2 <= 2:
        raise RcvvError(
            "the decomposition route needs k1 > 5/2 and k2 > 2 (shifted weights)"
        )
    kappa2 = (f.kappa - g.kappa) % 1
    exact = _is_exact(f.backend)

    # canonical route
    gv = theta_decompose(g)
    fv = as_tensor(theta_decompose(f), gv.meta, _scalar_meta(k2, kappa2))
    vv = bracket_pairing(fv, gv, k1=k1 - Fraction(1, 2), k2=k2, nu=nu, s=s, r=1)
    scaling = SymbolicValue.term(
        Fraction((4 * m) ** nu, math.factorial(nu)),
        powers=[(2 * m, Fraction(-1, 2))],
    )
    if exact:
        can_value = scaling * vv.value
    else:
        can_value = vv.value * _mpf(Fraction((4 * m) ** nu, math.factorial(nu))) / mpmath.sqrt(2 * m)
    scale_num = abs(float(scaling.evaluate()))
    canonical = PairingResult(
        can_value,
        vv.truncation_N,
        None if vv.tail_bound is None else scale_num * vv.tail_bound,
        "thm9:canonical",
        vv.details,
    )
    if mode == "canonical":
        return canonical

    # as-printed route
    Kp = k1 + k2 + 2 * nu - 1          # printed denominator exponent
    Kg = k1 + k2 + 2 * nu - Fraction(3, 2)  # printed gamma argument
    u_weights = [
        (-(s + kappa2)) ** u
        * Fraction(math.comb(nu, u))
        * gamma_ratio(k1 - Fraction(1, 2), nu, nu - u)
        * gamma_ratio(k2, nu, u)
        for u in range(nu + 1)
    ]
    printed_terms = {}
    for j in range(1, 2 * m + 1):
        gj = g.component(j)
        fj = f.component(j)
        for idx in range(0, min(gj.precision, fj.precision - s) + 1):
            cg = gj.coeffs.get(idx, 0)
            if cg == 0:
                continue
            e_comp = idx + gj.offset  # the value n + kappa1 - j^2/4m
            E = s + e_comp + kappa2
            cf, trusted = _lookup_by_exponent(fj, E)
            if not trusted or cf == 0:
                continue
            for u in range(nu + 1):
                w = u_weights[u] * e_comp ** (nu - u)
                if w == 0:
                    continue
                if exact:
                    term = (
                        _as_sym(cf)
                        * _as_sym(_conj(cg, g.backend))
                        * SymbolicValue.term(w, powers=[(E, -Kp)])
                    )
                else:
                    term = cf * mpmath.conj(cg) * _mpf(w) * mpmath.power(_mpf(E), -_mpf(Kp))
                printed_terms[(j, u, E)] = term
    if exact:
        pref = SymbolicValue.term(
            Fraction((4 * m) ** nu, math.factorial(nu)),
            gammas=[(Kg, 1)],
            pi_pow=-Kp,
            powers=[(4, -Kp), (2 * m, Fraction(-1, 2))],
        )
        printed_value = pref * sum(printed_terms.values(), SymbolicValue.zero())
    else:
        pref = (
            _mpf(Fraction((4 * m) ** nu, math.factorial(nu)))
            * mpmath.gamma(_mpf(Kg))
            / (4 * mpmath.pi) ** _mpf(Kp)
            / mpmath.sqrt(2 * m)
        )
        printed_value = pref * mpmath.fsum(printed_terms.values(), absolute=False)
    as_printed = PairingResult(printed_value, vv.truncation_N, None, "thm9:as-printed")
    if mode == "as-printed":
        return as_printed

    rows = _pairing_comparison_rows(vv, printed_terms, s, kappa2, g)
    identical = canonical.value == as_printed.value
    return DualModeReport(
        canonical,
        as_printed,
        rows,
        identical,
        note="per-term factor as_printed/canonical = (4*pi*E)^(-1/2)",
    )


def _pairing_comparison_rows(vv_result, printed_terms, s, kappa2, g_decomposed_source):
    """Match canonical and printed contributions by (component, u, exponent)."""
    can_by_key = {}
    if vv_result.details:
        for (j, u, n), term in vv_result.details["contributions"].items():
            off = (
                g_decomposed_source.component(j).offset
                if hasattr(g_decomposed_source, "component")
                else 0
            )
            E = s + n + off + kappa2
            can_by_key[(j, u, E)] = term
    rows = []
    for key in sorted(set(can_by_key) | set(printed_terms), key=str):
        j, u, E = key
        can = can_by_key.get(key)
        pr = printed_terms.get(key)
        rows.append(
            {
                "component": j,
                "u": u,
                "exponent": str(E),
                "canonical_term": None if can is None else _row_value(can),
                "as_printed_term": None if pr is None else _row_value(pr),
                "factor": _ratio_string(E),
                "equal": False,
            }
        )
    return rows


def jacobi_bracket_adjoint(
    h: ThetaComponentForm,
    g: VVForm,
    *,
    k2,
    nu: int,
    mode: str = "both",
):
    """Adjoint family of f -> extended-bracket(f, g) on index-m cusp forms.

    canonical: decompose, apply the vector-valued adjoint at weights
    (k1, k2 - 1/2), scale by (4m)^nu / nu!, recompose.  as-printed:
    evaluate the displayed coefficient formula verbatim.  The two agree
    exactly; the report records the per-coefficient comparison.
    """
    nu = int(nu)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1")
    if g.dim != 1:
        raise MetaMismatchError("the modular factor must be scalar")
    m = h.index
    k1 = g.weight
    k2 = Fraction(k2)
    kappa1 = g.component(1).offset
    kappa2 = (h.kappa - kappa1) % 1
    if h.weight != k1 + k2 + 2 * nu:
        raise MetaMismatchError("input weight must be k1+k2+2nu")
    if not h.cusp_flag:
        raise MetaMismatchError("adjoint requires a cusp form input")
    if k1 <= 2 or k2 - Fraction(1, 2) <= 2:
        raise RcvvError("the decomposition route needs k1 > 2 and k2 > 5/2")
    exact = _is_exact(h.backend)

    meta2 = MultiplierData(
        k2 - Fraction(1, 2),
        tuple(component_offset(m, mu, kappa2) for mu in range(1, 2 * m + 1)),
    )
    hv = as_tensor(theta_decompose(h), g.meta, meta2)
    adj = bracket_adjoint(hv, g, k1=k1, k2=k2 - Fraction(1, 2), nu=nu)
    factor = Fraction((4 * m) ** nu, math.factorial(nu))
    scaled = vv_scale(adj.form, factor)
    can_form = theta_recompose(scaled, cusp_flag=True)
    tails = {key: float(factor) * t for key, t in adj.tail_bounds.items()}
    canonical = AdjointResult(can_form, tails, "prop2:canonical")
    if mode == "canonical":
        return canonical

    # as-printed evaluation, coefficient by coefficient
    K = k1 + k2 + 2 * nu - Fraction(3, 2)
    sign = Fraction((-4 * m) ** nu, math.factorial(nu))
    gseries = g.component(1)
    comps = []
    for mu in range(1, 2 * m + 1):
        hmu = h.component(mu)
        off_out = component_offset(m, mu, kappa2)
        n_out = can_form.component(mu).precision  # same window as canonical
        coeffs = {}
        for idx in range(0, n_out + 1):
            e_out = idx + off_out  # the value n + kappa2 - mu^2/4m
            if e_out == 0:
                continue
            u_weights = [
                (-e_out) ** u
                * Fraction(math.comb(nu, u))
                * gamma_ratio(k1, nu, nu - u)
                * gamma_ratio(k2 - Fraction(1, 2), nu, u)
                for u in range(nu + 1)
            ]
            acc = SymbolicValue.zero() if exact else mpmath.mpc(0)
            for t in range(0, gseries.precision + 1):
                b = gseries.coeffs.get(t, 0)
                E = e_out + t + kappa1
                ch, trusted = _lookup_by_exponent(hmu, E)
                if not trusted:
                    break  # the lookup index grows with t: later t untrusted too
                if b == 0 or ch == 0:
                    continue
                for u in range(nu + 1):
                    w = u_weights[u] * (t + kappa1) ** (nu - u)
                    if w == 0:
                        continue
                    if exact:
                        acc = acc + (
                            _as_sym(ch)
                            * _as_sym(_conj(b, g.backend))
                            * SymbolicValue.term(w, powers=[(E, -K)])
                        )
                    else:
                        acc += ch * mpmath.conj(b) * _mpf(w) * mpmath.power(_mpf(E), -_mpf(K))
            if exact:
                prefactor = SymbolicValue.term(
                    sign,
                    gammas=[(K, 1), (k2 - Fraction(3, 2), -1)],
                    pi_pow=(k2 - Fraction(3, 2)) - K,
                    powers=[(4, (k2 - Fraction(3, 2)) - K), (e_out, k2 - Fraction(3, 2))],
                )
                coeff = prefactor * acc
                if not coeff.is_zero():
                    coeffs[idx] = coeff
            else:
                prefactor = (
                    _mpf(sign)
                    * (4 * mpmath.pi * _mpf(e_out)) ** (_mpf(k2) - 1.5)
                    * mpmath.gamma(_mpf(K))
                    / (4 * mpmath.pi) ** _mpf(K)
                    / mpmath.gamma(_mpf(k2) - 1.5)
                )
                coeff = prefactor * acc
                if coeff != 0:
                    coeffs[idx] = coeff
        backend = FLOAT if h.backend == FLOAT else SYMBOLIC
        comps.append(FourierSeries(off_out, coeffs, can_form.component(mu).precision, backend))
    printed_form = ThetaComponentForm(m, k2, kappa2, comps, cusp_flag=True)
    if mode == "as-printed":
        return AdjointResult(printed_form, {}, "prop2:as-printed")

    rows = _adjoint_comparison_rows(can_form, printed_form)
    identical = all(row["equal"] for row in rows)
    return DualModeReport(
        canonical,
        AdjointResult(printed_form, {}, "prop2:as-printed"),
        rows,
        identical,
        note="printed adjoint formula matches the decomposition route exactly",
    )


def _adjoint_comparison_rows(can_form, printed_form):
    rows = []
    for mu in range(1, len(can_form.components) + 1):
        a = can_form.component(mu)
        b = printed_form.component(mu)
        n_max = min(a.precision, b.precision)
        for n in sorted(set(a.coeffs) | set(b.coeffs)):
            if n > n_max:
                continue
            va = a.coeffs.get(n)
            vb = b.coeffs.get(n)
            rows.append(
                {
                    "component": mu,
                    "index": n,
                    "canonical": None if va is None else _row_value(va),
                    "as_printed": None if vb is None else _row_value(vb),
                    "factor": "1",
                    "equal": va == vb,
                }
            )
    return rows


def skew_bracket_pairing(
    f: SkewThetaForm,
    g: SkewThetaForm,
    *,
    k2,
    nu: int,
    s: int,
    mode: str = "both",
):
    """Pairing of a skew cusp form f of weight k1+k2+2nu against the skew
    bracket of g (weight k1) with the scalar extraction series of weight k2.

    canonical mode: decompose both sides, apply the vector-valued pairing
    at weights (k1 - 1/2, k2), scale by 1/(nu! sqrt(2m)) and conjugate the
    whole value (the skew inner-product compatibility carries an outer
    conjugation; no index power appears, unlike the holomorphic case).

    as-printed mode: the displayed skew double sum verbatim; it differs
    from canonical per term by (4*pi*E)^(-1/2), as in the holomorphic case.
    """
    nu = int(nu)
    s = int(s)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1")
    if f.index != g.index:
        raise MetaMismatchError("index mismatch: %d vs %d" % (f.index, g.index))
    m = f.index
    k1 = g.weight
    k2 = Fraction(k2)
    if f.weight != k1 + k2 + 2 * nu:
        raise MetaMismatchError("first form weight must be k1+k2+2nu")
    if not f.cusp_flag:
        raise MetaMismatchError("pairing requires a cusp form")
    if k1 - Fraction(1, 2) <= 2 or k2 <= 2:
        raise RcvvError(
            "the decomposition route needs k1 > 5/2 and k2 > 2 (shifted weights)"
        )
    kappa2 = (g.kappa - f.kappa) % 1
    exact = _is_exact(f.backend)

    gv = skew_theta_decompose(g)
    fv = as_tensor(skew_theta_decompose(f), gv.meta, _scalar_meta(k2, kappa2))
    vv = bracket_pairing(fv, gv, k1=k1 - Fraction(1, 2), k2=k2, nu=nu, s=s, r=1)
    inv_fact = Fraction(1, math.factorial(nu))
    if exact:
        scaling = SymbolicValue.term(inv_fact, powers=[(2 * m, Fraction(-1, 2))])
        can_value = scaling * vv.value.conjugate()
        scale_num = abs(float(scaling.evaluate()))
    else:
        can_value = mpmath.conj(vv.value) * _mpf(inv_fact) / mpmath.sqrt(2 * m)
        scale_num = float(inv_fact) / math.sqrt(2 * m)
    canonical = PairingResult(
        can_value,
        vv.truncation_N,
        None if vv.tail_bound is None else scale_num * vv.tail_bound,
        "thm10:canonical",
        vv.details,
    )
    if mode == "canonical":
        return canonical

    Kp = k1 + k2 + 2 * nu - 1
    Kg = k1 + k2 + 2 * nu - Fraction(3, 2)
    u_weights = [
        (-(s + kappa2)) ** u
        * Fraction(math.comb(nu, u))
        * gamma_ratio(k1 - Fraction(1, 2), nu, nu - u)
        * gamma_ratio(k2, nu, u)
        for u in range(nu + 1)
    ]
    printed_terms = {}
    for j in range(1, 2 * m + 1):
        gj = g.component(j)
        fj = f.component(j)
        for idx in range(0, min(gj.precision, fj.precision - s) + 1):
            stored_g = gj.coeffs.get(idx, 0)
            if stored_g == 0:
                continue
            e_comp = idx + gj.offset  # the value -n - kappa1 + j^2/4m
            E = s + e_comp + kappa2
            stored_f, trusted = _lookup_by_exponent(fj, E)
            if not trusted or stored_f == 0:
                continue
            # printed integrand d_f * conj(d_g); stored = conj(d)
            if exact:
                pair = _as_sym(stored_f) * _as_sym(stored_g)
            else:
                pair = mpmath.conj(stored_f) * stored_g
            for u in range(nu + 1):
                w = u_weights[u] * e_comp ** (nu - u)
                if w == 0:
                    continue
                if exact:
                    term = pair * SymbolicValue.term(w, powers=[(E, -Kp)])
                else:
                    term = pair * _mpf(w) * mpmath.power(_mpf(E), -_mpf(Kp))
                printed_terms[(j, u, E)] = term
    if exact:
        pref = SymbolicValue.term(
            Fraction(1, math.factorial(nu)),
            gammas=[(Kg, 1)],
            pi_pow=-Kp,
            powers=[(4, -Kp), (2 * m, Fraction(-1, 2))],
        )
        printed_value = pref * sum(printed_terms.values(), SymbolicValue.zero())
    else:
        pref = (
            mpmath.gamma(_mpf(Kg))
            / (4 * mpmath.pi) ** _mpf(Kp)
            / mpmath.sqrt(2 * m)
            / math.factorial(nu)
        )
        printed_value = pref * mpmath.fsum(printed_terms.values(), absolute=False)
    as_printed = PairingResult(printed_value, vv.truncation_N, None, "thm10:as-printed")
    if mode == "as-printed":
        return as_printed

    rows = _pairing_comparison_rows(vv, printed_terms, s, kappa2, g)
    identical = canonical.value == as_printed.value
    return DualModeReport(
        canonical,
        as_printed,
        rows,
        identical,
        note="per-term factor as_printed/canonical = (4*pi*E)^(-1/2)",
    )


def skew_bracket_adjoint(
    h: SkewThetaForm,
    g: VVForm,
    *,
    k2,
    nu: int,
    mode: str = "both",
):
    """Adjoint family of f -> skew-bracket(f, g) on skew cusp forms.

    canonical: decompose, apply the vector-valued adjoint at weights
    (k1, k2 - 1/2), scale by 1/nu! (no index power), recompose on the skew
    side.  as-printed: the displayed coefficient formula verbatim; the two
    agree exactly.
    """
    nu = int(nu)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1")
    if g.dim != 1:
        raise MetaMismatchError("the modular factor must be scalar")
    m = h.index
    k1 = g.weight
    k2 = Fraction(k2)
    kappa1 = g.component(1).offset
    kappa2 = (h.kappa + kappa1) % 1
    if h.weight != k1 + k2 + 2 * nu:
        raise MetaMismatchError("input weight must be k1+k2+2nu")
    if not h.cusp_flag:
        raise MetaMismatchError("adjoint requires a cusp form input")
    if k1 <= 2 or k2 - Fraction(1, 2) <= 2:
        raise RcvvError("the decomposition route needs k1 > 2 and k2 > 5/2")
    exact = _is_exact(h.backend)

    meta2 = MultiplierData(
        k2 - Fraction(1, 2),
        tuple(skew_component_offset(m, mu, kappa2) for mu in range(1, 2 * m + 1)),
    )
    hv = as_tensor(skew_theta_decompose(h), g.meta, meta2)
    adj = bracket_adjoint(hv, g, k1=k1, k2=k2 - Fraction(1, 2), nu=nu)
    factor = Fraction(1, math.factorial(nu))
    scaled = vv_scale(adj.form, factor)
    can_form = skew_theta_recompose(scaled, cusp_flag=True)
    tails = {key: float(factor) * t for key, t in adj.tail_bounds.items()}
    canonical = AdjointResult(can_form, tails, "thm11:canonical")
    if mode == "canonical":
        return canonical

    # as-printed: the displayed d(n+kappa2, r) formula, evaluated per
    # component; the stored output coefficient is its conjugate.
    K = k1 + k2 + 2 * nu - Fraction(3, 2)
    sign = Fraction((-1) ** nu, math.factorial(nu))
    gseries = g.component(1)
    comps = []
    for mu in range(1, 2 * m + 1):
        hmu = h.component(mu)
        off_out = skew_component_offset(m, mu, kappa2)
        n_out = can_form.component(mu).precision
        coeffs = {}
        for idx in range(0, n_out + 1):
            e_out = idx + off_out  # the value -n - kappa2 + mu^2/4m
            if e_out == 0:
                continue
            u_weights = [
                (-e_out) ** u
                * Fraction(math.comb(nu, u))
                * gamma_ratio(k1, nu, nu - u)
                * gamma_ratio(k2 - Fraction(1, 2), nu, u)
                for u in range(nu + 1)
            ]
            acc = SymbolicValue.zero() if exact else mpmath.mpc(0)
            for t in range(0, gseries.precision + 1):
                b = gseries.coeffs.get(t, 0)
                E = e_out + t + kappa1
                stored_h, trusted = _lookup_by_exponent(hmu, E)
                if not trusted:
                    break
                if b == 0 or stored_h == 0:
                    continue
                # printed integrand d_h * b; stored_h = conj(d_h)
                if exact:
                    pair = _as_sym(stored_h) * _as_sym(b)
                else:
                    pair = mpmath.conj(stored_h) * b
                for u in range(nu + 1):
                    w = u_weights[u] * (t + kappa1) ** (nu - u)
                    if w == 0:
                        continue
                    if exact:
                        acc = acc + pair * SymbolicValue.term(w, powers=[(E, -K)])
                    else:
                        acc += pair * _mpf(w) * mpmath.power(_mpf(E), -_mpf(K))
            if exact:
                prefactor = SymbolicValue.term(
                    sign,
                    gammas=[(K, 1), (k2 - Fraction(3, 2), -1)],
                    pi_pow=(k2 - Fraction(3, 2)) - K,
                    powers=[(4, (k2 - Fraction(3, 2)) - K), (e_out, k2 - Fraction(3, 2))],
                )
                printed_d = prefactor * acc
                stored = printed_d  # conjugation is the identity on exact data
                if not stored.is_zero():
                    coeffs[idx] = stored
            else:
                prefactor = (
                    _mpf(sign)
                    * (4 * mpmath.pi * _mpf(e_out)) ** (_mpf(k2) - 1.5)
                    * mpmath.gamma(_mpf(K))
                    / (4 * mpmath.pi) ** _mpf(K)
                    / mpmath.gamma(_mpf(k2) - 1.5)
                )
                printed_d = prefactor * acc
                stored = mpmath.conj(printed_d)
                if stored != 0:
                    coeffs[idx] = stored
        backend = FLOAT if h.backend == FLOAT else SYMBOLIC
        comps.append(FourierSeries(off_out, coeffs, n_out, backend))
    printed_form = SkewThetaForm(m, k2, kappa2, comps, cusp_flag=True)
    if mode == "as-printed":
        return AdjointResult(printed_form, {}, "thm11:as-printed")

    rows = _skew_adjoint_rows(can_form, printed_form)
    identical = all(row["equal"] for row in rows)
    return DualModeReport(
        canonical,
        AdjointResult(printed_form, {}, "thm11:as-printed"),
        rows,
        identical,
        note="printed adjoint formula matches the decomposition route exactly",
    )


def _skew_adjoint_rows(can_form, printed_form):
    rows = []
    for mu in range(1, len(can_form.components) + 1):
        a = can_form.component(mu)
        b = printed_form.component(mu)
        n_max = min(a.precision, b.precision)
        for n in sorted(set(a.coeffs) | set(b.coeffs)):
            if n > n_max:
                continue
            va = a.coeffs.get(n)
            vb = b.coeffs.get(n)
            rows.append(
                {
                    "component": mu,
                    "index": n,
                    "canonical": None if va is None else _row_value(va),
                    "as_printed": None if vb is None else _row_value(vb),
                    "factor": "1",
                    "equal": va == vb,
                }
            )
    return rows
