"""Skew forms of index m: real-analytic in the first variable, holomorphic
in the elliptic one, with support on nonnegative discriminants.

Storage convention (fixed here once and used everywhere): component mu
holds the conjugated branch of the theta decomposition.  The stored series
coefficient at exponent

    e = r^2/(4m) - (n + kappa)  >=  0

equals conj(d(n + kappa, r)) for r congruent to mu mod 2m; on the rational
backend conjugation is the identity.  The component series offset is
(mu^2/4m - kappa) mod 1.  The prescribed decaying real-analytic factor of
the two-variable expansion is a deterministic function of (n, r, m) and is
never stored.

Under this convention the conjugate-variable derivative acts on stored
components as plain exponent multiplication, and the skew bracket becomes a
finite sum of diagonal component products, exactly parallel to the
holomorphic case but with no index-dependent scale factor.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    BackendMismatchError,
    InternalConsistencyError,
    MetaMismatchError,
    RcvvError,
    SupportError,
)
from .qseries import FourierSeries, add, diag_pow, mul, scale
from .vvforms import MultiplierData, VVForm, gen_binomial

__all__ = [
    "SkewThetaForm",
    "SkewCoefficientView",
    "skew_component_offset",
    "skew_theta_decompose",
    "skew_theta_recompose",
    "conj_derivative",
    "skew_rc_bracket",
]


def skew_component_offset(m: int, mu: int, kappa: Fraction) -> Fraction:
    """Series offset of stored component mu: (mu^2/4m - kappa) mod 1."""
    return (Fraction(mu * mu, 4 * m) - kappa) % 1


class SkewThetaForm:
    """Index m, weight k, offset kappa, and 2m stored (conjugated) series."""

    __slots__ = ("index", "weight", "kappa", "components", "cusp_flag", "backend")

    def __init__(self, index, weight, kappa, components, cusp_flag=False):
        index = int(index)
        if index < 1:
            raise MetaMismatchError("index must be a positive integer")
        weight = Fraction(weight)
        kappa = Fraction(kappa)
        if not 0 <= kappa < 1:
            raise MetaMismatchError("kappa must lie in [0,1), got %s" % kappa)
        components = tuple(components)
        if len(components) != 2 * index:
            raise MetaMismatchError(
                "need %d components for index %d, got %d"
                % (2 * index, index, len(components))
            )
        backend = components[0].backend
        for mu, series in enumerate(components, start=1):
            want = skew_component_offset(index, mu, kappa)
            if series.offset != want:
                raise MetaMismatchError(
                    "component %d offset %s, expected %s" % (mu, series.offset, want)
                )
            if series.backend != backend:
                raise BackendMismatchError("components carry mixed backends")
            mn = series.min_index()
            if mn is not None and mn < 0:
                raise SupportError(
                    "component %d has a negative exponent: support violated" % mu
                )
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "cusp_flag", bool(cusp_flag))
        object.__setattr__(self, "backend", backend)
        if cusp_flag:
            for mu, series in enumerate(components, start=1):
                if series.offset == 0 and series.precision >= 0 and 0 in series.coeffs:
                    raise MetaMismatchError(
                        "cusp flag set but boundary coefficient survives in component %d" % mu
                    )

    def __setattr__(self, name, value):
        raise AttributeError("SkewThetaForm is immutable")

    def component(self, mu: int) -> FourierSeries:
        return self.components[mu - 1]

    def precision(self) -> int:
        return min(s.precision for s in self.components)

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.components)

    def coefficients(self) -> "SkewCoefficientView":
        return SkewCoefficientView(self)

    def coefficient(self, n: int, r: int):
        return self.coefficients().get(n, r)

    def __eq__(self, other):
        if not isinstance(other, SkewThetaForm):
            return NotImplemented
        return (
            self.index == other.index
            and self.weight == other.weight
            and self.kappa == other.kappa
            and self.components == other.components
        )

    def __repr__(self):
        return "SkewThetaForm(m=%d, weight=%s, kappa=%s, N=%d%s)" % (
            self.index,
            self.weight,
            self.kappa,
            self.precision(),
            ", cusp" if self.cusp_flag else "",
        )


class SkewCoefficientView:
    """The d(n + kappa, r) table derived from the stored components.

    Reading a coefficient undoes the storage conjugation (a no-op on the
    rational backend).  Positive-discriminant support: exponents with
    r^2 - 4m(n+kappa) < 0 read as exact zero.
    """

    __slots__ = ("form",)

    def __init__(self, form: SkewThetaForm):
        object.__setattr__(self, "form", form)

    def __setattr__(self, name, value):
        raise AttributeError("view is immutable")

    def component_exponent(self, n: int, r: int) -> Fraction:
        m = self.form.index
        return Fraction(r * r, 4 * m) - (n + self.form.kappa)

    def get(self, n: int, r: int):
        return self.get_by_exponent(n + self.form.kappa, r)

    def get_by_exponent(self, q_exponent: Fraction, r: int):
        m = self.form.index
        e = Fraction(r * r, 4 * m) - Fraction(q_exponent)
        mu = (r - 1) % (2 * m) + 1
        series = self.form.component(mu)
        if e < 0:
            return _zero_like(series)
        idx = e - series.offset
        if idx.denominator != 1:
            return _zero_like(series)
        value = series.coefficient(int(idx))
        if series.backend == "float":
            return value.conjugate()
        return value


def _zero_like(series: FourierSeries):
    from .qseries import _coerce

    return _coerce(0, series.backend)


def skew_theta_decompose(f: SkewThetaForm) -> VVForm:
    """The stored component vector as a vector-valued form of weight k - 1/2."""
    meta = MultiplierData(
        f.weight - Fraction(1, 2),
        tuple(s.offset for s in f.components),
    )
    return VVForm(meta, f.components, cusp_flag=f.cusp_flag)


def skew_theta_recompose(F: VVForm, cusp_flag=None) -> SkewThetaForm:
    """Inverse of :func:`skew_theta_decompose`; infers (m, kappa) from the
    offsets and validates consistency."""
    if F.dim % 2:
        raise MetaMismatchError("component count must be even, got %d" % F.dim)
    m = F.dim // 2
    kappa = (-F.meta.offsets[2 * m - 1]) % 1
    for mu in range(1, 2 * m + 1):
        want = skew_component_offset(m, mu, kappa)
        if F.meta.offsets[mu - 1] != want:
            raise MetaMismatchError(
                "offsets inconsistent with index %d and kappa %s at component %d"
                % (m, kappa, mu)
            )
    flag = F.cusp_flag if cusp_flag is None else cusp_flag
    return SkewThetaForm(
        m, F.weight + Fraction(1, 2), kappa, F.components, cusp_flag=flag
    )


def conj_derivative(f: SkewThetaForm, s: int) -> SkewThetaForm:
    """s-fold normalised derivative in the conjugate variable.

    On a unit with exponent e read on the conjugate variable this
    multiplies by e; the stored components carry the same exponents, so it
    is exponent multiplication there as well.
    """
    s = int(s)
    if s < 0:
        raise RcvvError("derivative order must be >= 0")
    if s == 0:
        return f
    comps = tuple(diag_pow(series, s) for series in f.components)
    return SkewThetaForm(f.index, f.weight, f.kappa, comps, cusp_flag=f.cusp_flag)


def skew_rc_bracket(f: SkewThetaForm, g: VVForm, nu: int) -> SkewThetaForm:
    """Extended bracket of a skew form with a scalar modular form.

    On stored components:

        H_mu = sum_{r+s=nu} (-1)^s C(nu+k-3/2, s) C(nu+l-1, r)
                              D^r(G_mu) D^s(g),

    where D multiplies coefficients by their exponents.  The sign rides on
    the derivative count of the scalar factor: that placement is the unique
    one under which decomposing the bracket reproduces 1/nu! times the
    vector-valued bracket of the decomposition, for every nu.  The result
    has weight k + l + 2*nu, the same index, offset (kappa_f - kappa_g)
    folded into [0,1), and no index-dependent scale factor appears.
    """
    nu = int(nu)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1")
    if g.dim != 1:
        raise MetaMismatchError("second operand must be a scalar form, got dim %d" % g.dim)
    if f.backend != g.backend:
        raise BackendMismatchError("bracket operands carry different backends")
    m = f.index
    k = f.weight
    l = g.weight
    g_series = g.component(1)
    kappa_out = (f.kappa - g_series.offset) % 1
    comps = []
    for mu in range(1, 2 * m + 1):
        gmu = f.component(mu)
        acc = None
        for r in range(nu + 1):
            s = nu - r
            w = (
                Fraction(-1) ** s
                * gen_binomial(nu + k - Fraction(3, 2), s)
                * gen_binomial(nu + l - 1, r)
            )
            term = scale(mul(diag_pow(gmu, r), diag_pow(g_series, s)), w)
            acc = term if acc is None else add(acc, term)
        comps.append(acc)
    for mu, series in enumerate(comps, start=1):
        if series.offset == 0 and series.precision >= 0 and 0 in series.coeffs:
            raise InternalConsistencyError(
                "bracket output violates boundary cuspidality in component %d" % mu
            )
    return SkewThetaForm(m, k + l + 2 * nu, kappa_out, comps, cusp_flag=True)
