"""Closed-form constants: Gamma, the Arestov constants, Gamma-ratio bounds.

Everything that can overflow is evaluated through ``math.lgamma`` and
exponentiated at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .quadrature import grid_angles

INTEGRAL_REL_TOL = 1e-13
INTEGRAL_MAX_POINTS = 1 << 22
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise ValueError("gamma_fn is defined here for x > 0")
    if x > 171.0:
        raise OverflowError("Gamma overflows for x > 171; use log_gamma")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    if not x > 0:
        raise ValueError("log_gamma is defined here for x > 0")
    return math.lgamma(x)


def gamma_minimum(lo: float = 1.0, hi: float = 2.0, tol: float = 1e-10) -> float:
    """Location of the minimum of Gamma on ``(lo, hi)`` by golden-section search.

    Gamma is flat near its minimum, so values are compared in 30-digit
    arithmetic; in double precision the search stalls around 1e-8.
    """
    with mpmath.workdps(30):
        f = lambda t: mpmath.loggamma(mpmath.mpf(t))
        a, b = lo, hi
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        fc, fd = f(c), f(d)
        while b - a > tol:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - GOLDEN * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + GOLDEN * (b - a)
                fd = f(d)
    return (a + b) / 2


# -- Arestov constants ---------------------------------------------------------------

@dataclass(frozen=True)
class LambdaValue:
    """``Lambda(p, m)``, the ``L^p`` norm of ``(1 + z)**m`` on the circle, in two forms."""

    p: float
    m: int
    value_gamma_form: float
    value_integral_form: float
    consistency_gap: float

    @property
    def value(self) -> float:
        return self.value_gamma_form


def log_lambda_gamma_form(p: float, m: int) -> float:
    s = m * p
    return (m * math.log(2.0) - math.log(math.pi) / (2 * p)
            + (math.lgamma((s + 1) / 2) - math.lgamma((s + 2) / 2)) / p)


def _log_mean_scaled_power(s: float) -> float:
    """log of the mean of ``|(1 + z)/2|**s`` over the circle.

    The integrand behaves like ``|theta - pi|**s`` at ``z = -1``, which limits the
    trapezoid rule to order ``h**(1 + s)`` (order ``h**(3 + s)`` for the next
    term), so successive sums are combined by Richardson extrapolation with that
    known exponent.  Even integer ``s`` is a trigonometric polynomial and exact.
    """
    if s == 0:
        return 0.0

    def trap(N):
        c = np.abs(np.cos(grid_angles(N) / 2))
        with np.errstate(divide="ignore"):
            logs = s * np.log(c)
        top = logs.max()
        return top + math.log(math.fsum(np.exp(logs - top)) / N)

    exact_even = float(s).is_integer() and int(s) % 2 == 0
    N = 64
    if exact_even:
        while N <= s:
            N *= 2
        return trap(N)
    ratio = 2.0 ** (1.0 + s)
    prev_t = trap(N)
    prev_r = None
    while True:
        N *= 2
        t = trap(N)
        # extrapolate on the value, not the log
        r = (ratio * math.exp(t) - math.exp(prev_t)) / (ratio - 1.0)
        if prev_r is not None and abs(r - prev_r) <= INTEGRAL_REL_TOL * abs(r):
            return math.log(r)
        if N >= INTEGRAL_MAX_POINTS:
            return math.log(r)
        prev_t, prev_r = t, r


def log_lambda_integral_form(p: float, m: int) -> float:
    return m * math.log(2.0) + _log_mean_scaled_power(m * p) / p


def arestov_lambda(p: float, m: int) -> LambdaValue:
    if not p > 0:
        raise ValueError("p must be positive")
    if m < 0 or int(m) != m:
        raise ValueError("m must be a nonnegative integer")
    m = int(m)
    lg = log_lambda_gamma_form(p, m)
    li = log_lambda_integral_form(p, m)
    g, i = math.exp(lg), math.exp(li)
    # compare in log space so huge values do not lose the gap
    gap = abs(math.expm1(li - lg))
    return LambdaValue(p, m, g, i, gap)


def arestov_lambda_asymptotic(p: float, m: int) -> float:
    if not p > 0 or m < 1:
        raise ValueError("need p > 0 and m >= 1")
    return math.exp(math.log(2 / (math.pi * p)) / (2 * p) + m * math.log(2.0)
                    - math.log(m) / (2 * p))


def eq1_bound_check(m: int, k: int):
    """``(Lambda(k/m, m), 2**m, Lambda(k/m, m) < 2**m)``."""
    if m < 1 or k < 1:
        raise ValueError("need m, k >= 1")
    lhs = math.exp(log_lambda_gamma_form(k / m, m))
    rhs = 2.0 ** m
    return lhs, rhs, lhs < rhs


# -- Gamma-ratio bounds -------------------------------------------------------------

@dataclass(frozen=True)
class KwapienBound:
    value: float
    stirling_form: float

    @property
    def ratio(self) -> float:
        return self.value / self.stirling_form


def kwapien_lower_bound(p: float, q: float, m: int) -> KwapienBound:
    """``Gamma(q m/2 + 1)**(1/q) / Gamma(p m/2 + 1)**(1/p)`` and its Stirling form
    ``m**(1/(2q) - 1/(2p)) * (q/p)**(m/2)``."""
    if not 0 < p < q:
        raise ValueError("need 0 < p < q")
    if m < 1:
        raise ValueError("m must be >= 1")
    log_value = math.lgamma(q * m / 2 + 1) / q - math.lgamma(p * m / 2 + 1) / p
    log_stirling = (1 / (2 * q) - 1 / (2 * p)) * math.log(m) + m / 2 * math.log(q / p)
    return KwapienBound(math.exp(log_value), math.exp(log_stirling))


def comparison_constants(p: float, q: float):
    """``(sqrt(q/p), sqrt(q/min(p, 2)))``: the hypercontractive constant for
    homogeneous polynomials and the upper constant for arbitrary ones."""
    if not 0 < p < q:
        raise ValueError("need 0 < p < q")
    return math.sqrt(q / p), math.sqrt(q / min(p, 2.0))


def stirling_bracket(x: float):
    """Lower and upper Stirling bounds for ``Gamma(x + 1)``."""
    if not x > 0:
        raise ValueError("x must be positive")
    base = 0.5 * math.log(2 * math.pi) + (x + 0.5) * math.log(x) - x
    return math.exp(base), math.exp(base + 1 / (12 * x))


def interpolation_constant(theta: float) -> float:
    """``1 / (theta**theta * (1 - theta)**(1 - theta))`` with ``0**0 = 1``."""
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if theta == 1:
        return 1.0
    return math.exp(-(theta * math.log(theta) + (1 - theta) * math.log1p(-theta)))


def lambda_two_squared(m: int) -> int:
    """``Lambda(2, m)**2`` exactly: the sum of squared binomial coefficients of
    ``(1 + z)**m`` (Parseval), which equals ``binom(2m, m)``."""
    return sum(math.comb(m, k) ** 2 for k in range(m + 1))
