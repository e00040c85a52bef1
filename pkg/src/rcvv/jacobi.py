"""Two-variable forms of integral index m stored through their theta
decomposition.

A form of index m and expansion offset kappa is kept as its 2m component
series: component mu holds the coefficients c(n + kappa, r) for r congruent
to mu mod 2m, re-indexed by the component exponent

    e = (n + kappa) - r^2 / (4m)  >=  0,

which is a plain one-variable series with offset (kappa - mu^2/4m) mod 1.
The (n, r) coefficient table is a derived view, never stored.  The support
condition (nonpositive discriminant) is equivalent to all component
exponents being >= 0 and is enforced structurally; cuspidality means the
exponent-0 component coefficients vanish.
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
    "ThetaComponentForm",
    "JacobiCoefficientView",
    "component_offset",
    "theta_series",
    "theta_decompose",
    "theta_recompose",
    "heat_eigenvalue",
    "heat_apply",
    "jacobi_rc_bracket",
]


def component_offset(m: int, mu: int, kappa: Fraction) -> Fraction:
    """Series offset of component mu: (kappa - mu^2/4m) mod 1."""
    return (kappa - Fraction(mu * mu, 4 * m)) % 1


def residue_class(r: int, m: int) -> int:
    """The representative in 1..2m of r mod 2m."""
    return (r - 1) % (2 * m) + 1


class ThetaComponentForm:
    """Index m, weight k, offset kappa, and 2m component series."""

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
            want = component_offset(index, mu, kappa)
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
        raise AttributeError("ThetaComponentForm is immutable")

    def component(self, mu: int) -> FourierSeries:
        return self.components[mu - 1]

    def precision(self) -> int:
        return min(s.precision for s in self.components)

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.components)

    def coefficients(self) -> "JacobiCoefficientView":
        return JacobiCoefficientView(self)

    def coefficient(self, n: int, r: int):
        return self.coefficients().get(n, r)

    def __eq__(self, other):
        if not isinstance(other, ThetaComponentForm):
            return NotImplemented
        return (
            self.index == other.index
            and self.weight == other.weight
            and self.kappa == other.kappa
            and self.components == other.components
        )

    def __repr__(self):
        return "ThetaComponentForm(m=%d, weight=%s, kappa=%s, N=%d%s)" % (
            self.index,
            self.weight,
            self.kappa,
            self.precision(),
            ", cusp" if self.cusp_flag else "",
        )


class JacobiCoefficientView:
    """Faithful (n, r) re-indexing of the stored components.

    c(n + kappa, r) is the component-(r mod 2m) coefficient at exponent
    (n + kappa) - r^2/4m; a negative exponent is outside the support and
    reads as exact zero.
    """

    __slots__ = ("form",)

    def __init__(self, form: ThetaComponentForm):
        object.__setattr__(self, "form", form)

    def __setattr__(self, name, value):
        raise AttributeError("view is immutable")

    def component_exponent(self, n: int, r: int) -> Fraction:
        return (n + self.form.kappa) - Fraction(r * r, 4 * self.form.index)

    def get(self, n: int, r: int):
        """Coefficient at q-exponent n + kappa and elliptic index r."""
        return self.get_by_exponent(n + self.form.kappa, r)

    def get_by_exponent(self, q_exponent: Fraction, r: int):
        m = self.form.index
        e = Fraction(q_exponent) - Fraction(r * r, 4 * m)
        mu = residue_class(r, m)
        series = self.form.component(mu)
        if e < 0:
            return _zero_like(series)
        idx = e - series.offset
        if idx.denominator != 1:
            return _zero_like(series)
        return series.coefficient(int(idx))

    def support_exponents(self, r: int):
        """Stored (q-exponent, coefficient) pairs along elliptic index r."""
        m = self.form.index
        mu = residue_class(r, m)
        series = self.form.component(mu)
        shift = Fraction(r * r, 4 * m)
        return [(n + series.offset + shift, c) for n, c in series.items()]


def _zero_like(series: FourierSeries):
    from .qseries import _coerce

    return _coerce(0, series.backend)


def theta_series(m: int, mu: int, precision: int) -> JacobiCoefficientView:
    """The unary theta function of index m and residue mu as a coefficient
    view: coefficient 1 at every (exponent r^2/4m, r) with r = mu mod 2m and
    exponent <= precision."""
    m = int(m)
    mu = int(mu)
    if not 1 <= mu <= 2 * m:
        raise RcvvError("need 1 <= mu <= 2m, got mu=%d m=%d" % (mu, m))
    kappa = Fraction(mu * mu, 4 * m) % 1
    comps = []
    for j in range(1, 2 * m + 1):
        off = component_offset(m, j, kappa)
        coeffs = {0: Fraction(1)} if j == mu else {}
        comps.append(FourierSeries(off, coeffs, max(0, int(precision))))
    return JacobiCoefficientView(
        ThetaComponentForm(m, Fraction(1, 2), kappa, comps)
    )


def theta_decompose(f: ThetaComponentForm) -> VVForm:
    """Vector of theta components; a vector-valued form of weight k - 1/2."""
    meta = MultiplierData(
        f.weight - Fraction(1, 2),
        tuple(s.offset for s in f.components),
    )
    return VVForm(meta, f.components, cusp_flag=f.cusp_flag)


def theta_recompose(F: VVForm, cusp_flag=None) -> ThetaComponentForm:
    """Inverse of :func:`theta_decompose`.

    The meta must be consistent with some (m, kappa): the dimension is 2m
    and component 2m determines kappa since its residue shift is integral.
    """
    if F.dim % 2:
        raise MetaMismatchError("component count must be even, got %d" % F.dim)
    m = F.dim // 2
    kappa = F.meta.offsets[2 * m - 1]
    for mu in range(1, 2 * m + 1):
        want = component_offset(m, mu, kappa)
        if F.meta.offsets[mu - 1] != want:
            raise MetaMismatchError(
                "offsets inconsistent with index %d and kappa %s at component %d"
                % (m, kappa, mu)
            )
    flag = F.cusp_flag if cusp_flag is None else cusp_flag
    return ThetaComponentForm(
        m, F.weight + Fraction(1, 2), kappa, F.components, cusp_flag=flag
    )


def heat_eigenvalue(m: int, q_exponent, r: int) -> Fraction:
    """Eigenvalue of the index-m heat operator on the Fourier unit with
    q-exponent e and elliptic index r: -(r^2 - 4 m e).

    Forced by direct differentiation of the unit under the operator
    -(1/4pi^2)(8 pi i m d_tau - d_z^2); equivalently 4m times the component
    exponent, which is what makes the operator act diagonally on theta
    components.
    """
    e = Fraction(q_exponent)
    return -(Fraction(r * r) - 4 * m * e)


def heat_apply(f: ThetaComponentForm, power: int) -> ThetaComponentForm:
    """Apply the heat operator ``power`` times: component mu picks up the
    factor (4m * exponent)^power at each exponent."""
    power = int(power)
    if power < 0:
        raise RcvvError("heat power must be >= 0")
    if power == 0:
        return f
    factor = Fraction(4 * f.index) ** power
    comps = tuple(scale(diag_pow(s, power), factor) for s in f.components)
    return ThetaComponentForm(
        f.index, f.weight, f.kappa, comps, cusp_flag=f.cusp_flag
    )


def jacobi_rc_bracket(f: ThetaComponentForm, g: VVForm, nu: int) -> ThetaComponentForm:
    """Extended bracket of an index-m form with a scalar modular form:

        sum_{r+s=nu} C(nu+k-3/2, s) C(nu+l-1, r) (-4m)^s L^r(f) D^s(g),

    computed diagonally on theta components (L^r multiplies component
    coefficients by (4m * exponent)^r).  The result has weight k + l + 2*nu,
    the same index, offset kappa_f + kappa_g folded into [0,1), and is
    verified to be cuspidal at the discriminant-0 boundary.
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
    kappa_out = (f.kappa + g_series.offset) % 1
    comps = []
    for mu in range(1, 2 * m + 1):
        fmu = f.component(mu)
        acc = None
        for r in range(nu + 1):
            s = nu - r
            w = (
                gen_binomial(nu + k - Fraction(3, 2), s)
                * gen_binomial(nu + l - 1, r)
                * Fraction(-4 * m) ** s
                * Fraction(4 * m) ** r
            )
            term = scale(mul(diag_pow(fmu, r), diag_pow(g_series, s)), w)
            acc = term if acc is None else add(acc, term)
        comps.append(acc)
    for mu, series in enumerate(comps, start=1):
        if series.offset == 0 and series.precision >= 0 and 0 in series.coeffs:
            raise InternalConsistencyError(
                "bracket output violates boundary cuspidality in component %d" % mu
            )
    return ThetaComponentForm(m, k + l + 2 * nu, kappa_out, comps, cusp_flag=True)
