"""Classical scalar fixtures with exact rational coefficients.

Everything here is derived from first principles at call time: divisor sums
by enumeration, Bernoulli numbers by the defining recursion, and the
weight-12 cusp form from the normalised difference e4^3 - e6^2 over 1728.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import RcvvError
from .qseries import FourierSeries, mul, scale, sub
from .vvforms import VVForm, scalar_form

__all__ = [
    "sigma",
    "bernoulli_number",
    "eisenstein",
    "e4",
    "e6",
    "delta",
    "delta_e4",
    "e6_delta",
    "theta_like_quarter",
    "fixtures",
]


def sigma(power: int, n: int) -> int:
    """Divisor power sum sigma_power(n) by direct enumeration."""
    if n < 1:
        raise RcvvError("sigma needs n >= 1, got %d" % n)
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** power
            e = n // d
            if e != d:
                total += e ** power
        d += 1
    return total


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = -1/2), via the defining recursion."""
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(n):
        total += Fraction(math.comb(n + 1, j)) * bernoulli_number(j)
    return -total / (n + 1)


def eisenstein(k: int, precision: int) -> VVForm:
    """Normalised weight-k Eisenstein series, even k >= 4:
    1 - (2k / B_k) * sum_n sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise RcvvError("Eisenstein fixture needs even k >= 4, got %s" % k)
    c = Fraction(-2 * k) / bernoulli_number(k)
    coeffs = {0: Fraction(1)}
    for n in range(1, precision + 1):
        coeffs[n] = c * sigma(k - 1, n)
    return scalar_form(FourierSeries(0, coeffs, precision), k)


def e4(precision: int) -> VVForm:
    return eisenstein(4, precision)


def e6(precision: int) -> VVForm:
    return eisenstein(6, precision)


def delta(precision: int) -> VVForm:
    """The normalised weight-12 cusp form (e4^3 - e6^2) / 1728."""
    a = e4(precision).component(1)
    b = e6(precision).component(1)
    series = scale(sub(mul(mul(a, a), a), mul(b, b)), Fraction(1, 1728))
    return scalar_form(series.truncate(precision), 12, cusp_flag=True)


def delta_e4(precision: int) -> VVForm:
    """Normalised weight-16 cusp form, the product of delta and e4."""
    series = mul(delta(precision).component(1), e4(precision).component(1))
    return scalar_form(series.truncate(precision), 16, cusp_flag=True)


def e6_delta(precision: int) -> VVForm:
    """Normalised weight-18 cusp form, the product of e6 and delta."""
    series = mul(e6(precision).component(1), delta(precision).component(1))
    return scalar_form(series.truncate(precision), 18, cusp_flag=True)


def theta_like_quarter(precision: int) -> VVForm:
    """Scalar series with offset 1/4: coefficient 2 at each exponent r^2/4
    for odd r > 0 (the two residues +-r collapse onto one index).  Used to
    exercise fractional offsets."""
    coeffs = {}
    r = 1
    while (r * r - 1) // 4 <= precision:
        coeffs[(r * r - 1) // 4] = Fraction(2)
        r += 2
    return scalar_form(
        FourierSeries(Fraction(1, 4), coeffs, precision), Fraction(1, 2)
    )


def fixtures(precision: int) -> dict:
    """Named fixture bundle at a common precision."""
    return {
        "E4": e4(precision),
        "E6": e6(precision),
        "Delta": delta(precision),
        "DeltaE4": delta_e4(precision),
        "E6Delta": e6_delta(precision),
        "ThetaQuarter": theta_like_quarter(precision),
    }
