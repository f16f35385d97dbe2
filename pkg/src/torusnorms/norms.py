"""L^p norms, Mahler measure and exponential Orlicz norms on the torus.

Each functional has an exact path where one exists (Parseval, even-power
convolution, root products) and a quadrature path used otherwise and for
cross-checks.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import logsumexp

from . import roots as _roots
from .polynomial import (Polynomial, PolynomialError, coefficient_functionals, monomial_shear,
                         power_coefficients)
from .quadrature import (CLAMP_FLOOR, LOG, NormResult, Power, QuadratureSpec, abs_samples, adaptive_mean,
                         grid_angles)

EVEN_EXACT_MAX = 8
_ROW_CHUNK = 16384


@dataclass(frozen=True)
class OrliczSpec:
    """Young function ``psi(t) = exp(t**alpha) - 1`` and the bisection tolerance."""

    alpha: float
    rel_tol: float = 1e-8
    max_bisections: int = 200

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


def _exact_tol(value: float) -> float:
    return max(1e-13 * abs(value), 1e-15)


def _as_univariate_coeffs(P: Polynomial) -> np.ndarray:
    if P.n != 1:
        raise PolynomialError(f"expected a univariate polynomial, got n={P.n}")
    exps, coefs = P.arrays()
    out = np.zeros(int(exps.max()) + 1 if len(coefs) else 1, dtype=complex)
    out[exps[:, 0]] = coefs
    return out


# -- roots and univariate Mahler measure -------------------------------------------

def roots_univariate(P: Polynomial, tol: float = 1e-10):
    """All roots of a univariate polynomial (with multiplicity) and its
    leading coefficient."""
    return _roots.roots_univariate_coeffs(_as_univariate_coeffs(P), tol)


def mahler_univariate(P: Polynomial) -> NormResult:
    """``|a_m| * prod(max(1, |root|))``; clustered unimodular roots trigger the
    multiprecision path."""
    coeffs = _as_univariate_coeffs(P)
    if P.is_zero:
        return NormResult(0.0, "exact-roots")
    nz = np.flatnonzero(coeffs)
    if nz[-1] == nz[0]:
        v = float(abs(coeffs[nz[-1]]))
        return NormResult(v, "exact-roots", _exact_tol(v))
    try:
        r, lead = _roots.roots_univariate_coeffs(coeffs)
    except _roots.RootFindingError as exc:
        res = mahler_quadrature(P)
        notes = dict(res.notes, fallback=str(exc))
        return NormResult(res.value, res.method, res.error_estimate, res.converged, notes)
    notes = {}
    if _roots.clustered_on_circle(r[None, :], 2)[0]:
        logm = _roots.graeffe_log_mahler(coeffs)
        notes["refined"] = True
    else:
        logm = math.log(abs(lead)) + float(np.sum(np.log(np.maximum(np.abs(r), 1.0))))
    if np.any(np.abs(np.abs(r) - 1.0) < _roots.NEAR_CIRCLE):
        notes["warn"] = "root within 1e-9 of the unit circle"
    v = math.exp(logm)
    return NormResult(v, "exact-roots", _exact_tol(v) * len(r), True, notes)


def mahler_quadrature(P: Polynomial, spec: QuadratureSpec | None = None) -> NormResult:
    """``exp`` of the grid mean of ``log|P|`` (cross-check path)."""
    if P.is_zero:
        return NormResult(0.0, "quadrature")
    res = adaptive_mean(P, LOG, spec)
    v = math.exp(res.value)
    return NormResult(v, "quadrature", v * res.error_estimate, res.converged, res.notes)


# -- iterated Mahler measure in several variables -----------------------------------

def _inner_coefficients(C: np.ndarray, angle_lists) -> np.ndarray:
    """Contract the outer axes of ``C`` (inner axis last) with Vandermondes.

    Returns ``(G, D+1)`` coefficient rows, outer grid in row-major order.
    """
    out = C
    for angles in angle_lists:
        V = np.exp(1j * np.outer(angles, np.arange(out.shape[0])))
        out = np.tensordot(out, V, axes=([0], [1]))
    # out: (D+1, N_1, ..., N_k)
    return out.reshape(out.shape[0], -1).T


def _choose_orientation(P: Polynomial):
    """Pick the inner variable and shear that keep the inner polynomial away
    from vanishing identically on the outer torus.

    A factor depending only on the outer variables makes the outer integrand
    log-singular; shearing ``z_i -> z_i w`` turns such a factor into a genuine
    function of the inner variable.
    """
    k = P.n - 1
    probe = 256 if k == 1 else 32 if k == 2 else 8
    best = None
    for inner in range(P.n - 1, -1, -1):
        for shear in (0, 1):
            Q = monomial_shear(P, inner, shear)
            rows = _inner_coefficients(Q.dense(), [grid_angles(probe)] * k)
            norms = np.sqrt(np.sum(np.abs(rows) ** 2, axis=1))
            score = float(norms.min() / norms.max()) if norms.max() > 0 else 0.0
            if best is None or score > best[0] * (1 + 1e-9):
                best = (score, inner, shear, Q)
    return best


def _mp_row(Q: Polynomial, N: int, row: int):
    """Inner coefficients of ``Q`` at outer grid node ``row``, in multiprecision."""
    k = Q.n - 1
    idx = np.unravel_index(row, (N,) * k)
    D = max(a[-1] for a, _ in Q.terms)
    with mpmath.workdps(_roots.graeffe_dps(D)):
        z = [mpmath.expjpi(mpmath.mpf(2 * int(i)) / N) for i in idx]
        out = [mpmath.mpc(0)] * (D + 1)
        for alpha, c in Q.terms:
            term = mpmath.mpc(c)
            for zj, a in zip(z, alpha[:-1]):
                if a:
                    term *= zj ** a
            out[alpha[-1]] += term
        return out


def _iterated_log_mean(Q: Polynomial, N: int, cluster_min: int, memo: dict | None = None):
    k = Q.n - 1
    memo = {} if memo is None else memo

    def refine(row):
        # key by the node's angles as reduced fractions so coarser levels are reused
        idx = np.unravel_index(row, (N,) * k)
        key = tuple(Fraction(int(i), N) for i in idx)
        if key not in memo:
            memo[key] = _roots.graeffe_log_mahler(_mp_row(Q, N, row))
        return memo[key]

    C = Q.dense()
    angles = [grid_angles(N)] * k
    rows = _inner_coefficients(C, angles)
    logs = np.empty(rows.shape[0])
    info = {"refined": 0, "near_circle": 0, "degenerate": 0, "fallback": 0}
    for start in range(0, rows.shape[0], _ROW_CHUNK):
        block = rows[start:start + _ROW_CHUNK]
        vals, inf = _roots.log_mahler_batch(
            block, cluster_min=cluster_min,
            refine=lambda i, s=start: refine(s + i))
        logs[start:start + len(block)] = vals
        for key in info:
            info[key] += inf[key]
    floor = math.log(CLAMP_FLOOR)
    clamped = int(np.count_nonzero(logs < floor))
    logs = np.maximum(logs, floor)
    return math.fsum(np.sort(logs)) / logs.size, clamped, info


def mahler_measure(P: Polynomial, spec: QuadratureSpec | None = None) -> NormResult:
    """Mahler measure ``exp(mean of log|P| over the torus)``.

    One variable: root product.  Several variables: adaptive grid over the
    outer variables with the exact one-variable Mahler measure of the inner
    slice at each node.
    """
    if P.is_zero:
        return NormResult(0.0, "exact-roots")
    if P.n == 1:
        return mahler_univariate(P)
    if len(P.terms) == 1:
        v = abs(P.terms[0][1])
        return NormResult(v, "exact-roots", _exact_tol(v))
    return _mahler_iterated(P, spec or QuadratureSpec.default(P.n))


@functools.lru_cache(maxsize=4096)
def _mahler_iterated(P: Polynomial, spec: QuadratureSpec) -> NormResult:
    score, inner, shear, Q = _choose_orientation(P)
    N = spec.base_points_per_dim
    prev = None
    gap = math.inf
    converged = False
    totals = {"refined": 0, "clamped": 0}
    memo: dict = {}
    while True:
        logm, clamped, info = _iterated_log_mean(Q, N, cluster_min=3, memo=memo)
        totals["refined"] += info["refined"]
        totals["clamped"] = clamped
        est = math.exp(logm)
        if prev is not None:
            gap = abs(est - prev)
            if gap <= spec.rel_tol * est:
                converged = True
                break
        if N * 2 > spec.max_points_per_dim:
            break
        prev = est
        N *= 2
    notes = dict(totals, inner=inner, shear=shear, score=score, points_per_dim=N)
    return NormResult(est, "iterated-mixed", gap, converged, notes)


# -- L^p norms ------------------------------------------------------------------------

def lp_norm_exact_even(P: Polynomial, p: int) -> NormResult:
    """``||P||_p`` for even ``p <= 8`` via Parseval applied to ``P**(p/2)``."""
    if p not in (2, 4, 6, 8):
        raise ValueError(f"exact even-p path supports p in (2, 4, 6, 8), got {p}")
    if P.is_zero:
        return NormResult(0.0, "exact-parseval")
    l2 = float(np.linalg.norm(power_coefficients(P, int(p) // 2)))
    v = l2 ** (2.0 / p)
    method = "exact-parseval" if p == 2 else "exact-even-convolution"
    return NormResult(v, method, _exact_tol(v))


def _is_even_int(p) -> bool:
    return float(p).is_integer() and int(p) % 2 == 0


@functools.lru_cache(maxsize=4096)
def _lp_cached(P: Polynomial, p: float, spec: QuadratureSpec) -> NormResult:
    if P.is_zero:
        return NormResult(0.0, "exact-parseval")
    if len(P.terms) == 1:
        # |c z^alpha| = |c| on the torus
        return NormResult(abs(P.terms[0][1]), "closed-form")
    if p == 2:
        v = coefficient_functionals(P)[2]
        return NormResult(v, "exact-parseval", _exact_tol(v))
    if _is_even_int(p) and p <= EVEN_EXACT_MAX:
        return lp_norm_exact_even(P, int(p))
    res = adaptive_mean(P, Power(p), spec)
    mean = max(res.value, 0.0)
    v = mean ** (1.0 / p)
    err = v / p * (res.error_estimate / mean) if mean > 0 else res.error_estimate
    return NormResult(v, "quadrature", err, res.converged, res.notes)


def lp_norm(P: Polynomial, p: float, spec: QuadratureSpec | None = None) -> NormResult:
    """``(mean of |P|**p over the torus)**(1/p)``; a quasi-norm for ``p < 1``."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    return _lp_cached(P, float(p), spec or QuadratureSpec.default(P.n))


# -- Luxemburg norm ---------------------------------------------------------------------

def _orlicz_modular(t: np.ndarray, lam: float, alpha: float) -> float:
    x = (t / lam) ** alpha
    if x.max() > 700.0:
        log_mean = float(logsumexp(x)) - math.log(x.size)
        return math.inf if log_mean > 700.0 else math.expm1(log_mean)
    return float(np.mean(np.expm1(x)))


def _luxemburg_on_samples(t: np.ndarray, spec: OrliczSpec):
    F = functools.partial(_orlicz_modular, t, alpha=spec.alpha)
    lam0 = float(np.mean(t))
    if F(lam0) <= 1.0:
        hi, lo = lam0, lam0 / 2
        while F(lo) <= 1.0:
            hi, lo = lo, lo / 2
    else:
        lo, hi = lam0, 2 * lam0
        while F(hi) > 1.0:
            lo, hi = hi, 2 * hi
    for _ in range(spec.max_bisections):
        if (hi - lo) <= spec.rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if F(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi, F(hi)


def orlicz_luxemburg_norm(P: Polynomial, spec: OrliczSpec, quad: QuadratureSpec | None = None) -> NormResult:
    """``inf{lam > 0 : mean of psi(|P|/lam) <= 1}`` with ``psi(t) = exp(t**alpha) - 1``.

    The modular is evaluated on a fixed grid sample of ``|P|`` and inverted by
    bracketing and bisection; the grid is doubled until the root stabilises.
    """
    if P.is_zero:
        raise ValueError("the Luxemburg norm of the zero polynomial is 0 by convention; refusing to bisect")
    quad = quad or QuadratureSpec.default(P.n)
    N = quad.base_points_per_dim
    prev = None
    gap = math.inf
    converged = False
    while True:
        t = abs_samples(P, [grid_angles(N)] * P.n, key=(P, "grid", N))
        lam, Fval = _luxemburg_on_samples(t, spec)
        if prev is not None:
            gap = abs(lam - prev)
            if gap <= max(quad.rel_tol, spec.rel_tol) * lam:
                converged = True
                break
        if N * 2 > quad.max_points_per_dim:
            break
        prev = lam
        N *= 2
    err = max(gap, spec.rel_tol * lam)
    return NormResult(lam, "quadrature", err, converged,
                      {"points_per_dim": N, "modular": Fval, "alpha": spec.alpha})

