"""Exact values of the form  sum of  rational * gamma(q)^e * pi^p * prime^f.

Pairing formulas produce values like ``3628800 / (4*pi)^11`` or, for
half-integral weights, sums whose terms carry distinct radical factors
such as ``7^(1/2)``.  Collapsing these to floats would destroy the exact
equality tests the library is built around, so values are kept as formal
sums of canonical product terms:

* gamma factors are normalised: integer arguments fold into the rational
  part as factorials, half-integer arguments fold into a rational times
  ``pi^(1/2)``, and any other rational argument is reduced via the
  functional equation to an argument in (0, 1);
* powers of positive rationals are split into prime powers, with integer
  parts folded into the rational and fractional parts (in (0, 1)) kept
  symbolically;
* ``pi`` carries an arbitrary rational exponent.

Two values are equal iff their canonical term maps are equal, and
``evaluate`` produces an mpmath float at any requested precision.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from .errors import PoleDegeneracyError, RcvvError

__all__ = ["SymbolicValue"]

# signature of one product term, all parts canonical and hashable:
#   (gamma factors, pi exponent, prime powers)
# gamma factors: tuple of (argument in (0,1) and not 1/2, integer exponent)
# prime powers:  tuple of (prime, exponent in (0,1))
_Sig = tuple


def _factor_positive_int(n: int) -> dict[int, int]:
    """Prime factorisation by trial division; bases stay desk-sized here."""
    if n <= 0:
        raise RcvvError("can only factor positive integers, got %s" % n)
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _reduce_gamma(arg: Fraction) -> tuple[Fraction, Fraction, Fraction | None]:
    """Normalise one gamma factor.

    Returns (rational multiplier, pi exponent contribution, residual
    argument or None).  The residual, when present, lies in (0, 1) and is
    not 1/2.
    """
    if arg.denominator == 1:
        if arg <= 0:
            raise PoleDegeneracyError("gamma evaluated at nonpositive integer %s" % arg)
        return Fraction(math.factorial(int(arg) - 1)), Fraction(0), None
    if arg.denominator == 2:
        # walk to gamma(1/2) = sqrt(pi)
        mult = Fraction(1)
        x = arg
        while x > Fraction(1, 2):
            x -= 1
            mult *= x
        while x < Fraction(1, 2):
            mult /= x
            x += 1
        return mult, Fraction(1, 2), None
    mult = Fraction(1)
    x = arg
    frac = x - math.floor(x)
    while x > frac:
        x -= 1
        mult *= x
    while x < frac:
        mult /= x
        x += 1
    return mult, Fraction(0), frac


def _reduce_power(base: Fraction, exp: Fraction) -> tuple[Fraction, dict[int, Fraction]]:
    """Split base^exp into a rational part and fractional prime powers."""
    if exp == 0:
        return Fraction(1), {}
    if base == 1:
        return Fraction(1), {}
    if base <= 0:
        if base == 0:
            if exp > 0:
                return Fraction(0), {}
            raise RcvvError("zero base with nonpositive exponent")
        raise RcvvError("symbolic powers require positive bases, got %s" % base)
    if exp.denominator == 1:
        return base ** int(exp), {}
    rat = Fraction(1)
    primes: dict[int, Fraction] = {}
    for p, mult in _factor_positive_int(base.numerator).items():
        total = mult * exp
        whole = math.floor(total)
        rat *= Fraction(p) ** whole
        fr = total - whole
        if fr:
            primes[p] = primes.get(p, Fraction(0)) + fr
    for p, mult in _factor_positive_int(base.denominator).items():
        total = -mult * exp
        whole = math.floor(total)
        rat *= Fraction(p) ** whole
        fr = total - whole
        if fr:
            primes[p] = primes.get(p, Fraction(0)) + fr
    return rat, primes


def _merge_primes(a: dict[int, Fraction], b: dict[int, Fraction]) -> tuple[Fraction, dict[int, Fraction]]:
    """Merge fractional prime-power maps; integer carries go to the rational."""
    rat = Fraction(1)
    out = dict(a)
    for p, f in b.items():
        tot = out.get(p, Fraction(0)) + f
        whole = math.floor(tot)
        if whole:
            rat *= Fraction(p) ** whole
            tot -= whole
        if tot:
            out[p] = tot
        elif p in out:
            del out[p]
    return rat, out


class SymbolicValue:
    """A finite formal sum of canonical rational-gamma-pi-radical products."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[_Sig, Fraction] | None = None):
        self._terms = {} if terms is None else {s: r for s, r in terms.items() if r != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "SymbolicValue":
        return cls()

    @classmethod
    def one(cls) -> "SymbolicValue":
        return cls.from_rational(1)

    @classmethod
    def from_rational(cls, q) -> "SymbolicValue":
        q = Fraction(q)
        if q == 0:
            return cls()
        return cls({((), Fraction(0), ()): q})

    @classmethod
    def term(cls, rational, *, gammas=(), pi_pow=0, powers=()) -> "SymbolicValue":
        """One product term.

        gammas: iterable of (argument, integer exponent);
        powers: iterable of (positive rational base, rational exponent).
        """
        rat = Fraction(rational)
        if rat == 0:
            return cls()
        gmap: dict[Fraction, int] = {}
        pi_exp = Fraction(pi_pow)
        primes: dict[int, Fraction] = {}
        for arg, e in gammas:
            arg = Fraction(arg)
            e = int(e)
            if e == 0:
                continue
            mult, pi_c, residual = _reduce_gamma(arg)
            rat *= mult ** e
            pi_exp += pi_c * e
            if residual is not None:
                gmap[residual] = gmap.get(residual, 0) + e
                if gmap[residual] == 0:
                    del gmap[residual]
        for base, exp in powers:
            mult, pmap = _reduce_power(Fraction(base), Fraction(exp))
            rat *= mult
            if rat == 0:
                return cls()
            carry, primes = _merge_primes(primes, pmap)
            rat *= carry
        sig = (
            tuple(sorted(gmap.items())),
            pi_exp,
            tuple(sorted(primes.items())),
        )
        return cls({sig: rat})

    @classmethod
    def gamma(cls, arg) -> "SymbolicValue":
        return cls.term(1, gammas=[(arg, 1)])

    @classmethod
    def power(cls, base, exp) -> "SymbolicValue":
        return cls.term(1, powers=[(base, exp)])

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(s == ((), Fraction(0), ()) for s in self._terms)

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if not self.is_rational():
            raise RcvvError("value carries transcendental factors: %s" % self)
        return next(iter(self._terms.values()))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymbolicValue.from_rational(other)
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        out = dict(self._terms)
        for sig, rat in other._terms.items():
            tot = out.get(sig, Fraction(0)) + rat
            if tot:
                out[sig] = tot
            elif sig in out:
                del out[sig]
        return SymbolicValue(out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicValue({s: -r for s, r in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymbolicValue.from_rational(other)
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                return SymbolicValue()
            return SymbolicValue({s: r * q for s, r in self._terms.items()})
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        out: dict[_Sig, Fraction] = {}
        for (g1, p1, pr1), r1 in self._terms.items():
            for (g2, p2, pr2), r2 in other._terms.items():
                gmap = dict(g1)
                for arg, e in g2:
                    gmap[arg] = gmap.get(arg, 0) + e
                    if gmap[arg] == 0:
                        del gmap[arg]
                carry, primes = _merge_primes(dict(pr1), dict(pr2))
                sig = (tuple(sorted(gmap.items())), p1 + p2, tuple(sorted(primes.items())))
                tot = out.get(sig, Fraction(0)) + r1 * r2 * carry
                if tot:
                    out[sig] = tot
                elif sig in out:
                    del out[sig]
        return SymbolicValue(out)

    __rmul__ = __mul__

    def inverse(self) -> "SymbolicValue":
        """Multiplicative inverse; defined for single-term values only."""
        if len(self._terms) != 1:
            raise RcvvError("can only invert single-term symbolic values")
        (gs, pi_exp, primes), rat = next(iter(self._terms.items()))
        inv_g = tuple((a, -e) for a, e in gs)
        carry = Fraction(1)
        inv_p: dict[int, Fraction] = {}
        for p, f in primes:
            # p^-f = p^-1 * p^(1-f)
            carry /= p
            inv_p[p] = 1 - f
        sig = (inv_g, -pi_exp, tuple(sorted(inv_p.items())))
        return SymbolicValue({sig: carry / rat})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, Fraction(other))
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        return self * other.inverse()

    def conjugate(self) -> "SymbolicValue":
        """Exact values built from real rational data are real."""
        return self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymbolicValue.from_rational(other)
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        return self._terms == other._terms

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    # -- output ------------------------------------------------------------

    def evaluate(self, prec: int | None = None):
        """Numeric value as an mpmath float at ``prec`` bits (default context)."""
        with mpmath.workprec(prec or mpmath.mp.prec):
            total = mpmath.mpf(0)
            for (gs, pi_exp, primes), rat in sorted(self._terms.items()):
                v = mpmath.mpf(rat.numerator) / rat.denominator
                if pi_exp:
                    v *= mpmath.power(mpmath.pi, mpmath.mpf(pi_exp.numerator) / pi_exp.denominator)
                for arg, e in gs:
                    v *= mpmath.gamma(mpmath.mpf(arg.numerator) / arg.denominator) ** e
                for p, f in primes:
                    v *= mpmath.power(p, mpmath.mpf(f.numerator) / f.denominator)
                total += v
            return +total

    def __float__(self):
        return float(self.evaluate())

    def as_string(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (gs, pi_exp, primes), rat in sorted(self._terms.items()):
            factors = [str(rat)]
            if pi_exp:
                factors.append("pi^(%s)" % pi_exp)
            for arg, e in gs:
                factors.append("gamma(%s)^%d" % (arg, e) if e != 1 else "gamma(%s)" % arg)
            for p, f in primes:
                factors.append("%d^(%s)" % (p, f))
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return "SymbolicValue(%s)" % self.as_string()

    def __str__(self):
        return self.as_string()
