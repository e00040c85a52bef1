"""Vector-valued modular forms as typed bundles of Fourier series, and the
bilinear differential bracket that sends a pair of weights (k1, k2) to a
cusp form of weight k1 + k2 + 2*nu.

Only the diagonal action of the translation generator is represented: the
multiplier data consists of the weight, the dimension, and one fractional
exponent per component.  That is exactly the information governing Fourier
expansions, brackets, and the coefficient pairing formulas; nothing else
about the representation is housed here.

Tensor metadata keeps the two factor metas around (``factors``), because
pairing formulas index slots by the factor offsets and need the integer
carry of each folded offset to translate between stored indices and true
exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BackendMismatchError,
    InternalConsistencyError,
    MetaMismatchError,
    PoleDegeneracyError,
    RcvvError,
)
from .qseries import FourierSeries, add, diag_pow, mul, scale

__all__ = [
    "MultiplierData",
    "VVForm",
    "BracketPlan",
    "gamma_ratio",
    "gen_binomial",
    "tensor_meta",
    "bracket_plan",
    "rc_bracket",
    "swap_slots",
    "vv_add",
    "vv_scale",
    "vv_sub",
    "scalar_form",
    "as_tensor",
]


def gamma_ratio(k, nu: int, i: int) -> Fraction:
    """Rising product (k+i)(k+i+1)...(k+nu-1), the exact value of
    gamma(k+nu)/gamma(k+i).

    Empty for i = nu.  A zero factor means the ratio is formally a gamma
    quotient at a pole, which the bracket's weight hypotheses exclude, so it
    is reported as an error rather than taken as a limit.
    """
    k = Fraction(k)
    nu = int(nu)
    i = int(i)
    if not 0 <= i <= nu:
        raise RcvvError("need 0 <= i <= nu, got i=%d nu=%d" % (i, nu))
    out = Fraction(1)
    for t in range(i, nu):
        factor = k + t
        if factor == 0:
            raise PoleDegeneracyError(
                "gamma ratio has zero factor at k + %d with k = %s" % (t, k)
            )
        out *= factor
    return out


def gen_binomial(x, s: int) -> Fraction:
    """Generalised binomial coefficient x(x-1)...(x-s+1)/s!, any rational x."""
    x = Fraction(x)
    s = int(s)
    if s < 0:
        raise RcvvError("gen_binomial needs s >= 0, got %d" % s)
    out = Fraction(1)
    for t in range(s):
        out *= x - t
    return out / math.factorial(s)


@dataclass(frozen=True)
class MultiplierData:
    """Weight, dimension and per-component fractional exponents.

    The offsets are the diagonal translation eigenphases: component j
    expands in powers of q^(n + offsets[j-1]).  ``factors`` marks a tensor
    product and keeps both factor metas for slot bookkeeping.
    """

    weight: Fraction
    offsets: tuple
    factors: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))
        offs = tuple(Fraction(o) for o in self.offsets)
        if not offs:
            raise MetaMismatchError("dimension must be >= 1")
        for o in offs:
            if not 0 <= o < 1:
                raise MetaMismatchError("offset %s outside [0,1)" % o)
        object.__setattr__(self, "offsets", offs)
        if self.factors is not None:
            m1, m2 = self.factors
            if m1.dim * m2.dim != len(offs):
                raise MetaMismatchError("tensor factor dimensions do not match")
            for j in range(1, m1.dim + 1):
                for l in range(1, m2.dim + 1):
                    want = (m1.offsets[j - 1] + m2.offsets[l - 1]) % 1
                    if offs[(j - 1) * m2.dim + (l - 1)] != want:
                        raise MetaMismatchError(
                            "tensor offset at slot (%d,%d) is not the folded sum" % (j, l)
                        )

    @property
    def dim(self) -> int:
        return len(self.offsets)

    # tensor slot bookkeeping (row-major: first factor outer) -------------

    def slot_index(self, j: int, l: int) -> int:
        """0-based position of slot (j, l), arguments 1-based."""
        m1, m2 = self._require_factors()
        if not (1 <= j <= m1.dim and 1 <= l <= m2.dim):
            raise MetaMismatchError("slot (%d,%d) out of range" % (j, l))
        return (j - 1) * m2.dim + (l - 1)

    def slot_pair(self, idx: int) -> tuple:
        m1, m2 = self._require_factors()
        return idx // m2.dim + 1, idx % m2.dim + 1

    def carry(self, j: int, l: int) -> int:
        """1 when the factor offsets at (j, l) sum past 1, else 0.  The true
        exponent of stored index n is n - carry + offsets1[j] + offsets2[l]."""
        m1, m2 = self._require_factors()
        return int(m1.offsets[j - 1] + m2.offsets[l - 1] >= 1)

    def _require_factors(self):
        if self.factors is None:
            raise MetaMismatchError("meta does not carry a tensor structure")
        return self.factors


def tensor_meta(m1: MultiplierData, m2: MultiplierData, weight=None) -> MultiplierData:
    """Tensor-product meta with row-major slots and folded offsets.

    The weight is the caller's choice (brackets add 2*nu); it defaults to
    the sum of the factor weights.
    """
    offs = tuple(
        (o1 + o2) % 1 for o1 in m1.offsets for o2 in m2.offsets
    )
    w = m1.weight + m2.weight if weight is None else Fraction(weight)
    return MultiplierData(w, offs, factors=(m1, m2))


class VVForm:
    """A multiplier meta plus one Fourier series per component.

    Component indices start at n >= 0.  When ``cusp_flag`` is set, every
    component whose offset is 0 must have a vanishing coefficient at
    exponent 0; this is validated eagerly.
    """

    __slots__ = ("meta", "components", "cusp_flag", "backend")

    def __init__(self, meta: MultiplierData, components, cusp_flag=False):
        components = tuple(components)
        if len(components) != meta.dim:
            raise MetaMismatchError(
                "expected %d components, got %d" % (meta.dim, len(components))
            )
        backend = components[0].backend
        for series, offset in zip(components, meta.offsets):
            if series.offset != offset:
                raise MetaMismatchError(
                    "component offset %s does not match meta offset %s"
                    % (series.offset, offset)
                )
            if series.backend != backend:
                raise BackendMismatchError("components carry mixed backends")
            mn = series.min_index()
            if mn is not None and mn < 0:
                raise MetaMismatchError("component indices must start at n >= 0")
        object.__setattr__(self, "meta", meta)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "cusp_flag", bool(cusp_flag))
        object.__setattr__(self, "backend", backend)
        if cusp_flag:
            bad = self._exponent_zero_violations()
            if bad:
                raise MetaMismatchError(
                    "cusp flag set but exponent-0 coefficient survives in component %d" % bad[0]
                )

    def __setattr__(self, name, value):
        raise AttributeError("VVForm is immutable")

    def _exponent_zero_violations(self):
        out = []
        for j, series in enumerate(self.components, start=1):
            if series.offset == 0 and series.precision >= 0 and 0 in series.coeffs:
                out.append(j)
        return out

    @property
    def weight(self) -> Fraction:
        return self.meta.weight

    @property
    def dim(self) -> int:
        return self.meta.dim

    def component(self, j: int) -> FourierSeries:
        """1-based component access."""
        return self.components[j - 1]

    def precision(self) -> int:
        return min(s.precision for s in self.components)

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.components)

    def __eq__(self, other):
        if not isinstance(other, VVForm):
            return NotImplemented
        return (
            self.meta.weight == other.meta.weight
            and self.meta.offsets == other.meta.offsets
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.meta.weight, self.meta.offsets, self.components))

    def __repr__(self):
        return "VVForm(weight=%s, dim=%d, N=%d%s)" % (
            self.weight,
            self.dim,
            self.precision(),
            ", cusp" if self.cusp_flag else "",
        )


def scalar_form(series: FourierSeries, weight, cusp_flag=False) -> VVForm:
    """Wrap one series as a dimension-1 form."""
    meta = MultiplierData(Fraction(weight), (series.offset,))
    return VVForm(meta, (series,), cusp_flag=cusp_flag)


def vv_add(f: VVForm, g: VVForm) -> VVForm:
    if f.meta.offsets != g.meta.offsets or f.weight != g.weight:
        raise MetaMismatchError("cannot add forms with different metas")
    comps = tuple(add(a, b) for a, b in zip(f.components, g.components))
    return VVForm(f.meta, comps, cusp_flag=f.cusp_flag and g.cusp_flag)


def vv_sub(f: VVForm, g: VVForm) -> VVForm:
    return vv_add(f, vv_scale(g, -1))


def vv_scale(f: VVForm, c) -> VVForm:
    comps = tuple(scale(s, c) for s in f.components)
    return VVForm(f.meta, comps, cusp_flag=f.cusp_flag)


def as_tensor(f: VVForm, m1: MultiplierData, m2: MultiplierData) -> VVForm:
    """Retag a form as living on the tensor of two factor metas.

    Validates that the form's offsets are exactly the folded factor offsets
    (for diagonal unitary translation action the dual side carries the same
    offsets as the primal side, so this check covers both).
    """
    meta = tensor_meta(m1, m2, weight=f.weight)
    if meta.offsets != f.meta.offsets:
        raise MetaMismatchError("form offsets are not the folded factor offsets")
    return VVForm(meta, f.components, cusp_flag=f.cusp_flag)


@dataclass(frozen=True)
class BracketPlan:
    """The nu+1 rational term weights of the bracket
    sum_i w_i * f1^(i) (x) f2^(nu-i), with
    w_i = (-1)^(nu-i) C(nu,i) R(k1,nu,i) R(k2,nu,nu-i)
    and R the rising gamma-ratio product."""

    nu: int
    k1: Fraction
    k2: Fraction
    weights: tuple

    def weight_out(self) -> Fraction:
        return self.k1 + self.k2 + 2 * self.nu


def bracket_plan(k1, k2, nu: int) -> BracketPlan:
    k1 = Fraction(k1)
    k2 = Fraction(k2)
    nu = int(nu)
    if nu < 1:
        raise RcvvError("bracket order nu must be >= 1, got %d" % nu)
    weights = tuple(
        (-1) ** (nu - i)
        * Fraction(math.comb(nu, i))
        * gamma_ratio(k1, nu, i)
        * gamma_ratio(k2, nu, nu - i)
        for i in range(nu + 1)
    )
    return BracketPlan(nu, k1, k2, weights)


def rc_bracket(f1: VVForm, f2: VVForm, nu: int) -> VVForm:
    """Bracket of order nu; lands in the cusp space of weight k1 + k2 + 2*nu
    on the tensor meta.

    Cuspidality is re-verified eagerly on the computed coefficients: every
    slot with folded offset 0 must vanish at exponent 0.  A violation would
    mean the implementation itself is broken.
    """
    if f1.backend != f2.backend:
        raise BackendMismatchError("bracket operands carry different backends")
    plan = bracket_plan(f1.weight, f2.weight, nu)
    meta = tensor_meta(f1.meta, f2.meta, weight=plan.weight_out())
    comps = []
    for j in range(1, f1.dim + 1):
        for l in range(1, f2.dim + 1):
            acc = None
            for i, w in enumerate(plan.weights):
                term = scale(
                    mul(diag_pow(f1.component(j), i), diag_pow(f2.component(l), nu - i)),
                    w,
                )
                acc = term if acc is None else add(acc, term)
            comps.append(acc)
    for slot, series in enumerate(comps):
        if series.offset == 0 and series.precision >= 0 and 0 in series.coeffs:
            raise InternalConsistencyError(
                "bracket output is not cuspidal at slot %s" % (meta.slot_pair(slot),)
            )
    return VVForm(meta, comps, cusp_flag=True)


def swap_slots(f: VVForm) -> VVForm:
    """Reindex a tensor-meta form by exchanging the two factors:
    slot (j, l) of the input becomes slot (l, j) of the output."""
    m1, m2 = f.meta._require_factors()
    meta = tensor_meta(m2, m1, weight=f.weight)
    comps = [None] * f.dim
    for idx in range(f.dim):
        j, l = f.meta.slot_pair(idx)
        comps[meta.slot_index(l, j)] = f.components[idx]
    return VVForm(meta, tuple(comps), cusp_flag=f.cusp_flag)
