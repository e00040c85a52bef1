"""Truncated Fourier expansions  sum_n a(n+kappa) q^(n+kappa)  with a rational
offset kappa in [0,1), integer-indexed sparse coefficients, and an explicit
truncation bound.

Coefficient backends:

* ``rational`` -- exact ``fractions.Fraction`` values (the default; every
  identity test in the suite runs here);
* ``float``    -- mpmath complex values at >= 64 bits, used by the numeric
  verification layer;
* ``symbolic`` -- :class:`~rcvv.symbolic.SymbolicValue`, used for adjoint
  coefficient families whose entries carry exact transcendental factors.

A series is trusted for every index n <= precision: absent entries in that
range are exact zeros.  Values are immutable after construction and all
operations are pure functions, so series can be shared freely.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import (
    BackendMismatchError,
    OffsetMismatchError,
    PrecisionError,
    RcvvError,
)
from .symbolic import SymbolicValue

__all__ = [
    "FourierSeries",
    "RATIONAL",
    "FLOAT",
    "SYMBOLIC",
    "add",
    "sub",
    "mul",
    "scale",
    "diag_pow",
    "agree_up_to",
    "to_float",
]

RATIONAL = "rational"
FLOAT = "float"
SYMBOLIC = "symbolic"

MIN_FLOAT_PREC = 64
DEFAULT_FLOAT_PREC = 113


def _coerce(value, backend):
    if backend == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise BackendMismatchError("rational backend needs int/Fraction, got %r" % (value,))
    if backend == FLOAT:
        if isinstance(value, Fraction):
            value = mpmath.mpf(value.numerator) / value.denominator
        elif isinstance(value, (int, float)):
            value = mpmath.mpmathify(value)
        if isinstance(value, (mpmath.mpf, complex)):
            value = mpmath.mpc(value)
        if not isinstance(value, mpmath.mpc):
            raise BackendMismatchError("float backend needs a complex number, got %r" % (value,))
        if not (mpmath.isfinite(value.real) and mpmath.isfinite(value.imag)):
            raise RcvvError("float coefficients must be finite, got %s" % value)
        return value
    if backend == SYMBOLIC:
        if isinstance(value, (int, Fraction)):
            return SymbolicValue.from_rational(value)
        if isinstance(value, SymbolicValue):
            return value
        raise BackendMismatchError("symbolic backend needs SymbolicValue, got %r" % (value,))
    raise RcvvError("unknown backend %r" % (backend,))


def _is_zero(value, backend):
    if backend == FLOAT:
        return value == mpmath.mpc(0)
    if backend == SYMBOLIC:
        return value.is_zero()
    return value == 0


class FourierSeries:
    __slots__ = ("offset", "coeffs", "precision", "backend")

    def __init__(self, offset, coeffs, precision, backend=RATIONAL):
        offset = Fraction(offset)
        if not 0 <= offset < 1:
            raise OffsetMismatchError("offset must lie in [0,1), got %s" % offset)
        precision = int(precision)
        clean = {}
        for n, c in coeffs.items():
            n = int(n)
            if n > precision:
                raise PrecisionError(
                    "coefficient at index %d exceeds precision bound %d" % (n, precision)
                )
            c = _coerce(c, backend)
            if not _is_zero(c, backend):
                clean[n] = c
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("FourierSeries is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, offset=0, precision=0, backend=RATIONAL):
        return cls(offset, {}, precision, backend)

    @classmethod
    def from_list(cls, values, offset=0, backend=RATIONAL):
        """Series from dense coefficients for n = 0, 1, ...; N = len-1."""
        return cls(offset, dict(enumerate(values)), len(values) - 1, backend)

    # -- access ------------------------------------------------------------

    def coefficient(self, n):
        """Trusted coefficient at index n; raises beyond the precision bound."""
        if n > self.precision:
            raise PrecisionError(
                "index %d beyond trusted range N=%d" % (n, self.precision)
            )
        return self.coeffs.get(n, _coerce(0, self.backend))

    def exponent(self, n) -> Fraction:
        return n + self.offset

    def min_index(self):
        return min(self.coeffs) if self.coeffs else None

    def items(self):
        return sorted(self.coeffs.items())

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, new_precision) -> "FourierSeries":
        new_precision = int(new_precision)
        kept = {n: c for n, c in self.coeffs.items() if n <= new_precision}
        return FourierSeries(self.offset, kept, new_precision, self.backend)

    # -- operators ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, FourierSeries):
            return add(self, other)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, FourierSeries):
            return sub(self, other)
        return NotImplemented

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, FourierSeries):
            return mul(self, other)
        if isinstance(other, (int, Fraction, SymbolicValue, mpmath.mpf, mpmath.mpc, float, complex)):
            return scale(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return (
            self.backend == other.backend
            and self.offset == other.offset
            and self.precision == other.precision
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.offset, self.precision, self.backend, frozenset(self.coeffs.items())))

    def __repr__(self):
        return "FourierSeries(offset=%s, N=%d, %d terms, %s)" % (
            self.offset,
            self.precision,
            len(self.coeffs),
            self.backend,
        )


def _check_backends(a: FourierSeries, b: FourierSeries):
    if a.backend != b.backend:
        raise BackendMismatchError("mixed backends %s and %s" % (a.backend, b.backend))


def add(a: FourierSeries, b: FourierSeries) -> FourierSeries:
    """Coefficientwise sum; requires equal offsets; N = min(Na, Nb)."""
    _check_backends(a, b)
    if a.offset != b.offset:
        raise OffsetMismatchError("cannot add offsets %s and %s" % (a.offset, b.offset))
    n_out = min(a.precision, b.precision)
    out = {}
    for n, c in a.coeffs.items():
        if n <= n_out:
            out[n] = c
    for n, c in b.coeffs.items():
        if n <= n_out:
            out[n] = out[n] + c if n in out else c
    return FourierSeries(a.offset, out, n_out, a.backend)


def sub(a: FourierSeries, b: FourierSeries) -> FourierSeries:
    return add(a, scale(b, -1))


def mul(a: FourierSeries, b: FourierSeries) -> FourierSeries:
    """Cauchy convolution.

    The output offset is (a.offset + b.offset) mod 1 with the integer carry
    folded into indices.  The output bound is the largest N such that every
    coefficient up to N is fully determined by the trusted ranges of the
    inputs: contributions pair a trusted-possibly-nonzero index of one
    factor with an untrusted index of the other only above
    min(Na + min_b, Nb + min_a) + carry.
    """
    _check_backends(a, b)
    total = a.offset + b.offset
    carry = int(total >= 1)
    offset = total - carry
    bounds = []
    if b.coeffs:
        bounds.append(a.precision + min(b.coeffs))
    if a.coeffs:
        bounds.append(b.precision + min(a.coeffs))
    if not bounds:
        bounds.append(a.precision + b.precision)
    n_out = min(bounds) + carry
    out = {}
    for n1, c1 in a.coeffs.items():
        for n2, c2 in b.coeffs.items():
            n = n1 + n2 + carry
            if n > n_out:
                continue
            prod = c1 * c2
            out[n] = out[n] + prod if n in out else prod
    return FourierSeries(offset, out, n_out, a.backend)


def scale(a: FourierSeries, c) -> FourierSeries:
    """Scalar multiple.  Rational series promote to symbolic when scaled by a
    SymbolicValue; all other cross-backend scalings are rejected."""
    backend = a.backend
    if isinstance(c, SymbolicValue):
        if backend == FLOAT:
            raise BackendMismatchError("cannot scale a float series symbolically")
        backend = SYMBOLIC
    c = _coerce(c, backend)
    if backend == SYMBOLIC and a.backend == RATIONAL:
        out = {n: c * SymbolicValue.from_rational(v) for n, v in a.coeffs.items()}
    else:
        out = {n: c * v for n, v in a.coeffs.items()}
    return FourierSeries(a.offset, out, a.precision, backend)


def diag_pow(a: FourierSeries, s: int) -> FourierSeries:
    """Multiply the coefficient at index n by (n + kappa)^s.

    This is the s-fold normalised derivative acting on q^(n+kappa); the
    offset and precision are unchanged.  (0 + 0)^0 counts as 1, so s = 0 is
    the identity.
    """
    s = int(s)
    if s < 0:
        raise RcvvError("diag_pow needs s >= 0, got %d" % s)
    if s == 0:
        return a
    out = {}
    for n, c in a.coeffs.items():
        factor = (n + a.offset) ** s
        if a.backend == FLOAT:
            factor = mpmath.mpf(factor.numerator) / factor.denominator
        out[n] = c * factor
    return FourierSeries(a.offset, out, a.precision, a.backend)


def agree_up_to(a: FourierSeries, b: FourierSeries, n_max=None) -> bool:
    """True when both series have identical coefficients for all n <= n_max
    (default: the smaller precision).  Offsets must match."""
    if a.offset != b.offset or a.backend != b.backend:
        return False
    if n_max is None:
        n_max = min(a.precision, b.precision)
    if n_max > min(a.precision, b.precision):
        raise PrecisionError("comparison range exceeds trusted precision")
    for n in set(a.coeffs) | set(b.coeffs):
        if n <= n_max and a.coeffs.get(n) != b.coeffs.get(n):
            return False
    return True


def to_float(a: FourierSeries, prec: int = DEFAULT_FLOAT_PREC) -> FourierSeries:
    """Convert a rational series to the float backend at ``prec`` bits."""
    if a.backend == FLOAT:
        return a
    if a.backend != RATIONAL:
        raise BackendMismatchError("can only float rational series")
    if prec < MIN_FLOAT_PREC:
        raise RcvvError("float backend requires >= %d bits" % MIN_FLOAT_PREC)
    with mpmath.workprec(prec):
        out = {
            n: mpmath.mpc(mpmath.mpf(c.numerator) / c.denominator)
            for n, c in a.coeffs.items()
        }
    return FourierSeries(a.offset, out, a.precision, FLOAT)
