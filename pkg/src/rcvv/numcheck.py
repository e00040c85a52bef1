"""Scalar-case numerical verification: truncated coefficient-extraction
series via coset enumeration, and Petersson integrals by quadrature over
the standard fundamental domain.

This layer validates the closed-form pairing values independently of the
formulas that produced them.  It works at verification tolerances (1e-2 /
5e-2 relative), so the heavy evaluation is vectorised with numpy in double
precision; the structured tail estimates are computed separately.  Sums
use numpy's pairwise reduction, so results are deterministic for identical
inputs.

Scope: trivial multiplier (offset 0) and even integral weight only.
Evaluating general multiplier/representation data at arbitrary group
elements would need generator-word data that the coefficient formulas
themselves never use; the scalar case already exercises them end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import MetaMismatchError, PrecisionError, RcvvError
from .qseries import FourierSeries, diag_pow
from .vvforms import VVForm

__all__ = [
    "CosetRep",
    "QuadratureSpec",
    "NumericResult",
    "coset_reps",
    "poincare_eval",
    "poincare_batch",
    "series_evaluator",
    "petersson_integral",
]


@dataclass(frozen=True)
class CosetRep:
    """One unimodular integer matrix; the translation-coset class is
    determined by the bottom row (c, d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise RcvvError("matrix is not unimodular: %s" % (self,))


@dataclass
class QuadratureSpec:
    """Knobs for the verification integrals.

    depth controls the Gauss-Legendre grid (node counts double with each
    increment); y_max truncates the fundamental domain at the cusp;
    c_cutoff / d_cutoff truncate the coset sum.  The d-range is widened by
    c/2 internally so the cutoff is effective uniformly over |x| <= 1/2.
    """

    depth: int = 1
    y_max: float = 10.0
    c_cutoff: int = 30
    d_cutoff: int = 40

    def __post_init__(self):
        if self.y_max <= 1:
            raise RcvvError("y_max must exceed 1")
        if self.c_cutoff < 1:
            raise RcvvError("c_cutoff must be >= 1")


@dataclass
class NumericResult:
    value: complex
    error: float
    parts: dict = field(default_factory=dict)


def _ext_euclid_rep(c: int, d: int) -> CosetRep:
    """Canonical representative with lower row (c, d): a is the inverse of
    d mod c chosen in [0, c)."""
    if c == 0:
        if d not in (1, -1):
            raise RcvvError("c = 0 requires d = +-1")
        return CosetRep(d, 0, 0, d)
    a = pow(d, -1, c)
    b = (a * d - 1) // c
    return CosetRep(a, b, c, d)


def coset_reps(c_max: int, d_max: int, both_signs: bool = True) -> list:
    """Translation-coset representatives indexed by coprime bottom rows.

    Enumerates (c, d) with 0 <= c <= c_max (c = 0 contributing only d = 1)
    and |d| <= d_max coprime to c; with ``both_signs`` each matrix is
    emitted together with its negation, matching the summation convention
    that pairs the 1/2 prefactor of the series definition.
    """
    if c_max < 0 or d_max < 1:
        raise RcvvError("need c_max >= 0 and d_max >= 1")
    out = [CosetRep(1, 0, 0, 1)]
    for c in range(1, c_max + 1):
        for d in range(-d_max, d_max + 1):
            if math.gcd(c, d) != 1:
                continue
            out.append(_ext_euclid_rep(c, d))
    if both_signs:
        out += [CosetRep(-r.a, -r.b, -r.c, -r.d) for r in out]
    return out


def _require_even_weight(k) -> int:
    k = Fraction(k)
    if k.denominator != 1 or int(k) % 2 or k <= 2:
        raise RcvvError(
            "trivial-multiplier evaluation needs an even integer weight > 2, got %s" % k
        )
    return int(k)


def _coset_arrays(spec: QuadratureSpec):
    d_range = spec.d_cutoff + spec.c_cutoff // 2 + 1
    reps = coset_reps(spec.c_cutoff, d_range)
    a = np.array([r.a for r in reps], dtype=np.float64)
    c = np.array([r.c for r in reps], dtype=np.float64)
    d = np.array([r.d for r in reps], dtype=np.float64)
    return a, c, d


def poincare_batch(k, s: int, taus: np.ndarray, spec: QuadratureSpec, order: int = 0):
    """Truncated series values over an array of points.

    order 0 returns P; order 1 returns (P, P') where P' is the normalised
    derivative (d/dtau)/(2 pi i), computed term by term.
    """
    k = _require_even_weight(k)
    s = int(s)
    if s < 0:
        raise RcvvError("need s >= 0")
    taus = np.asarray(taus, dtype=np.complex128)
    if np.any(taus.imag <= 0):
        raise RcvvError("evaluation points must lie in the upper half-plane")
    a_all, c_all, d_all = _coset_arrays(spec)
    total = np.zeros(taus.shape, dtype=np.complex128)
    total_d = np.zeros(taus.shape, dtype=np.complex128)
    chunk = max(1, int(2_000_000 // max(1, taus.size)))
    two_pi_i = 2j * np.pi
    for lo in range(0, a_all.size, chunk):
        a = a_all[lo : lo + chunk]
        c = c_all[lo : lo + chunk]
        d = d_all[lo : lo + chunk]
        w = c[None, :] * taus[..., None] + d[None, :]
        w_pow = w ** (-k)
        if s == 0:
            e = np.ones_like(w)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                m_tau = np.where(
                    c[None, :] != 0,
                    a[None, :] / np.where(c[None, :] != 0, c[None, :], 1.0)
                    - 1.0 / (np.where(c[None, :] != 0, c[None, :], 1.0) * w),
                    taus[..., None],
                )
            e = np.exp(two_pi_i * s * m_tau)
        total += (w_pow * e).sum(axis=-1)
        if order >= 1:
            deriv = s * w ** (-k - 2) - (k * c[None, :] / two_pi_i) * w ** (-k - 1)
            total_d += (deriv * e).sum(axis=-1)
    total *= 0.5
    total_d *= 0.5
    if order >= 1:
        return total, total_d
    return total


def poincare_eval(k, s: int, tau: complex, spec: QuadratureSpec) -> complex:
    """Truncated series value at one point."""
    return complex(poincare_batch(k, s, np.array([tau]), spec)[0])


def series_evaluator(form, derivative: int = 0):
    """Vectorised evaluator of a scalar form's q-expansion (optionally of
    its normalised derivative).  Returns a callable on complex arrays."""
    if isinstance(form, VVForm):
        if form.dim != 1:
            raise MetaMismatchError("series evaluation needs a scalar form")
        series = form.component(1)
    elif isinstance(form, FourierSeries):
        series = form
    else:
        raise MetaMismatchError("cannot evaluate %r" % (form,))
    series = diag_pow(series, derivative)
    exps = np.array(
        [float(n + series.offset) for n, _ in series.items()], dtype=np.float64
    )
    coefs = np.array([complex(c) for _, c in series.items()], dtype=np.complex128)

    def evaluate(taus):
        taus = np.asarray(taus, dtype=np.complex128)
        if exps.size == 0:
            return np.zeros(taus.shape, dtype=np.complex128)
        phases = np.exp(2j * np.pi * exps[None, :] * taus[..., None])
        return phases @ coefs

    evaluate.min_exponent = float(exps.min()) if exps.size else math.inf
    evaluate.truncation_tail = _series_tail_bound(series)
    return evaluate


def _series_tail_bound(series: FourierSeries) -> float:
    """Crude bound on the dropped tail of the expansion at the lowest point
    of the fundamental domain (y = sqrt(3)/2), assuming the stored
    coefficients' growth continues: max stored |a| times the geometric tail
    of |q| past the precision bound."""
    q_abs = math.exp(-2 * math.pi * math.sqrt(3) / 2)
    biggest = 0.0
    for _, c in series.items():
        biggest = max(biggest, abs(complex(c)))
    if biggest == 0.0:
        return 0.0
    n_next = series.precision + 1
    # allow the same growth ratio as observed across the stored range
    growth = max(2.0, biggest ** (1.0 / max(series.precision, 1)))
    return biggest * growth * q_abs ** (n_next + float(series.offset)) / (1 - q_abs)


def _gauss_nodes(lo: float, hi: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    mid = (hi + lo) / 2
    half = (hi - lo) / 2
    return mid + half * x, half * w


def _domain_grid(spec: QuadratureSpec, depth: int):
    """Iterated Gauss-Legendre grid over the truncated fundamental domain
    { |x| <= 1/2, |tau| >= 1, y <= y_max }: for each x node, y runs from
    sqrt(1 - x^2) to y_max in two panels."""
    nx = 24 * 2 ** depth
    ny = 12 * 2 ** depth
    xs, wxs = _gauss_nodes(-0.5, 0.5, nx)
    taus = []
    weights = []
    y_split = min(2.0, spec.y_max)
    for x, wx in zip(xs, wxs):
        y0 = math.sqrt(1 - x * x)
        ys1, wy1 = _gauss_nodes(y0, y_split, ny)
        ys2, wy2 = _gauss_nodes(y_split, spec.y_max, ny)
        ys = np.concatenate([ys1, ys2])
        wys = np.concatenate([wy1, wy2])
        taus.append(x + 1j * ys)
        weights.append(wx * wys)
    return np.concatenate(taus), np.concatenate(weights)


def _integral_once(pair, k: float, spec: QuadratureSpec, depth: int) -> complex:
    f_call, g_call = pair
    taus, weights = _domain_grid(spec, depth)
    vals = f_call(taus) * np.conj(g_call(taus)) * taus.imag ** (k - 2)
    return complex((weights * vals).sum())


def petersson_integral(
    pair,
    k,
    spec: QuadratureSpec,
    decay_rate: float | None = None,
    tolerance: float | None = None,
) -> NumericResult:
    """Invariant pairing integral of two scalar evaluators over the
    truncated fundamental domain, with a self-consistency error estimate.

    The value is the finer of two nested grids; the reported error is the
    grid disagreement plus an analytic estimate of the y > y_max tail
    (boundary magnitude folded against the exponential decay ``decay_rate``,
    default taken from the evaluators' minimal exponents) plus any series
    truncation slack the evaluators advertise.  When a ``tolerance`` is
    requested, evaluators whose advertised expansion slack at the bottom of
    the domain already exceeds it are rejected up front.
    """
    k = float(k)
    f_call, g_call = pair
    if tolerance is not None:
        slack = getattr(f_call, "truncation_tail", 0.0) + getattr(
            g_call, "truncation_tail", 0.0
        )
        if slack > tolerance:
            raise PrecisionError(
                "series truncation slack %.3e exceeds the requested tolerance %.3e"
                % (slack, tolerance)
            )
    coarse = _integral_once(pair, k, spec, spec.depth)
    fine = _integral_once(pair, k, spec, spec.depth + 1)
    grid_err = abs(fine - coarse)

    if decay_rate is None:
        # the cusp side always decays; assume nothing about the other factor
        rate = 2 * math.pi * getattr(g_call, "min_exponent", 1.0)
    else:
        rate = float(decay_rate)
    xs = np.linspace(-0.5, 0.5, 65)
    boundary = xs + 1j * spec.y_max
    boundary_mag = float(
        np.max(np.abs(f_call(boundary) * np.conj(g_call(boundary))))
        * spec.y_max ** (k - 2)
    )
    growth = (k - 2) / spec.y_max
    if rate > growth:
        y_tail = boundary_mag / (rate - growth)
    else:
        y_tail = math.inf
    series_slack = getattr(f_call, "truncation_tail", 0.0) + getattr(
        g_call, "truncation_tail", 0.0
    )
    err = grid_err + y_tail + series_slack
    return NumericResult(
        fine,
        err,
        {
            "grid_disagreement": grid_err,
            "y_tail": y_tail,
            "series_slack": series_slack,
            "depth": spec.depth + 1,
        },
    )
