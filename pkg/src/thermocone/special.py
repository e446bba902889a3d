"""Special functions used by the convergence and distillation formulas.

The regularised incomplete beta function is evaluated with the Lentz
continued fraction (the standard Numerical-Recipes scheme); scipy only
serves as an independent cross-check in the test suite.  The normal CDF and
its inverse are taken from scipy's Cephes bindings, which implement the
usual high-accuracy rational approximations.
"""

from __future__ import annotations

import math

from scipy.special import ndtr, ndtri

_MAX_ITER = 500
_EPS = 1e-16
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RuntimeError(f"incomplete beta continued fraction failed for a={a}, b={b}, x={x}")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularised incomplete beta function I_x(a, b).

    Requires a, b > 0 and 0 <= x <= 1.  Relative accuracy is at the level of
    the continued-fraction convergence threshold (~1e-15); the symmetry
    I_x(a,b) = 1 - I_{1-x}(b,a) is used to keep the fraction in its fast
    convergence region.
    """
    if not (a > 0 and b > 0):
        raise ValueError("shape parameters must be positive")
    if not (0.0 <= x <= 1.0):
        raise ValueError("argument must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def normal_cdf(x: float) -> float:
    """Standard normal cumulative distribution Phi(x)."""
    return float(ndtr(x))


def normal_cdf_inv(p: float) -> float:
    """Inverse of the standard normal CDF, Phi^{-1}(p), for p in (0, 1)."""
    if not (0.0 < p < 1.0):
        raise ValueError("quantile argument must lie in (0, 1)")
    return float(ndtri(p))


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
