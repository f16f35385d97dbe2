"""Batched polynomial root finding and root-based log Mahler measures.

Coefficient arrays here are ordered by increasing power, one polynomial per
row.  Roots come from simultaneous Aberth-Ehrlich iteration, with companion
matrix eigenvalues as the fallback for rows that fail to converge.

Root products are ill-conditioned when several roots cluster on the unit
circle (``(1 + z)**8`` loses about two digits of its Mahler measure in double
precision), so such rows are recomputed with Graeffe root squaring in
multiprecision.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

ABERTH_MAXITER = 200
CLUSTER_RADIUS = 0.1
NEAR_CIRCLE = 1e-9
MP_DPS = 80
GRAEFFE_STEPS = 48


class RootFindingError(RuntimeError):
    pass


def _horner(coeffs_hi: np.ndarray, z: np.ndarray) -> np.ndarray:
    # coeffs_hi: (B, D+1) highest power first; z: (B, K)
    out = np.broadcast_to(coeffs_hi[:, :1], z.shape).astype(complex)
    for k in range(1, coeffs_hi.shape[1]):
        out = out * z + coeffs_hi[:, k:k + 1]
    return out


def _companion_roots(monic_hi: np.ndarray) -> np.ndarray:
    B, D1 = monic_hi.shape
    D = D1 - 1
    comp = np.zeros((B, D, D), dtype=complex)
    comp[:, 0, :] = -monic_hi[:, 1:]
    if D > 1:
        idx = np.arange(D - 1)
        comp[:, idx + 1, idx] = 1.0
    return np.linalg.eigvals(comp)


def aberth_batch(coeffs: np.ndarray, tol: float = 1e-15, maxiter: int = ABERTH_MAXITER):
    """Roots of each row of ``coeffs`` (increasing powers, nonzero leading term).

    Returns ``(roots, converged)`` with ``roots`` of shape ``(B, D)``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    B, D1 = coeffs.shape
    D = D1 - 1
    if D < 1:
        return np.zeros((B, 0), dtype=complex), np.ones(B, bool)
    hi = coeffs[:, ::-1] / coeffs[:, -1:]
    if D == 1:
        return -hi[:, 1:2], np.ones(B, bool)
    dhi = hi[:, :-1] * np.arange(D, 0, -1)
    # start on a circle of radius (|a_0/a_D|)^(1/D) around the root centroid
    centroid = -hi[:, 1] / D
    radius = np.abs(hi[:, -1]) ** (1.0 / D)
    radius = np.where(radius > 0, radius, 1.0) + np.abs(centroid)
    angles = 2 * math.pi * np.arange(D) / D + 0.4
    z = centroid[:, None] + radius[:, None] * np.exp(1j * angles)[None, :]
    active = np.ones(B, bool)
    eye = np.eye(D, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(maxiter):
            if not active.any():
                break
            za = z[active]
            p = _horner(hi[active], za)
            dp = _horner(dhi[active], za)
            diff = za[:, :, None] - za[:, None, :]
            diff[:, eye] = 1.0
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            s = inv.sum(axis=2)
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
            w = np.where(p == 0, 0.0, w)
            z[active] = za - w
            done = np.all(np.abs(w) <= tol * np.maximum(1.0, np.abs(za)), axis=1)
            bad = ~np.all(np.isfinite(z[active]), axis=1)
            idx = np.flatnonzero(active)
            active[idx[done | bad]] = False
            z[idx[bad]] = np.nan
    converged = np.all(np.isfinite(z), axis=1) & ~active
    if not converged.all():
        fix = ~converged
        z[fix] = _companion_roots(hi[fix])
    return z, converged


def residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """``|P(r)| / (|a_m| * max(1, |r|)**m)`` for each root."""
    coeffs = np.asarray(coeffs, dtype=complex)
    D = coeffs.shape[1] - 1
    hi = coeffs[:, ::-1]
    with np.errstate(all="ignore"):
        vals = np.abs(_horner(hi, roots))
        scale = np.abs(coeffs[:, -1:]) * np.maximum(1.0, np.abs(roots)) ** D
    return vals / scale


def roots_univariate_coeffs(coeffs, tol: float = 1e-10):
    """Roots of one polynomial given by increasing-power coefficients."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if len(c) < 2:
        raise RootFindingError("polynomial of degree < 1 has no roots to find")
    lead = c[-1]
    low = 0
    while c[low] == 0:
        low += 1
    reduced = c[low:]
    if len(reduced) > 1:
        r, ok = aberth_batch(reduced[None, :])
        r = r[0]
        res = residuals(reduced[None, :], r[None, :])[0]
        if not np.all(res < tol):
            r = _companion_roots((reduced[::-1] / lead)[None, :])[0]
            res = residuals(reduced[None, :], r[None, :])[0]
            if not np.all(res < tol):
                raise RootFindingError(f"root residual {res.max():.3g} exceeds {tol}")
    else:
        r = np.zeros(0, dtype=complex)
    return np.concatenate([np.zeros(low, dtype=complex), r]), lead


# -- Mahler measure from roots ---------------------------------------------------

def clustered_on_circle(roots: np.ndarray, min_size: int) -> np.ndarray:
    """Rows having ``min_size`` or more roots within ``CLUSTER_RADIUS`` of each
    other and of the unit circle."""
    if roots.shape[1] < min_size:
        return np.zeros(roots.shape[0], bool)
    near = np.abs(np.abs(roots) - 1.0) < CLUSTER_RADIUS
    dist = np.abs(roots[:, :, None] - roots[:, None, :])
    counts = (dist < CLUSTER_RADIUS).sum(axis=2)
    return np.any(near & (counts >= min_size), axis=1)


def graeffe_dps(degree: int) -> int:
    return max(MP_DPS, 16 * degree + 20)


def graeffe_log_mahler(coeffs, dps: int | None = None, steps: int = GRAEFFE_STEPS) -> float:
    """log M of the polynomial with the given (exact) coefficients, via Graeffe
    root squaring in ``dps``-digit arithmetic.

    Each step maps the roots to their squares and squares M; the normalized
    coefficient 2-norm brackets M within a factor ``binom(2D, D)**0.5``, so the
    residual bias after ``steps`` squarings is below ``2**-steps * D``.

    A k-fold root moves by about ``eps**(1/k)`` under rounding ``eps``, so the
    default precision grows with the degree (16 digits per root).
    """
    if dps is None:
        dps = graeffe_dps(len(coeffs) - 1)
    with mpmath.workdps(dps):
        a = [c if isinstance(c, (mpmath.mpc, mpmath.mpf)) else mpmath.mpc(complex(c))
             for c in coeffs]
        a = [mpmath.mpc(c) for c in a]
        while a and a[-1] == 0:
            a.pop()
        if not a:
            return -math.inf
        low = 0
        while a[low] == 0:
            low += 1
        a = a[low:]
        if len(a) == 1:
            return float(mpmath.log(abs(a[0])))
        acc = mpmath.mpf(0)
        weight = mpmath.mpf(1)
        for _ in range(steps):
            # even part of P(z) * P(-z): the roots squared
            alt = [c if i % 2 == 0 else -c for i, c in enumerate(a)]
            D = len(a) - 1
            a = [mpmath.fdot([(a[i], alt[2 * k - i])
                              for i in range(max(0, 2 * k - D), min(D, 2 * k) + 1)])
                 for k in range(D + 1)]
            nrm = mpmath.sqrt(mpmath.fsum(abs(c) ** 2 for c in a))
            a = [c / nrm for c in a]
            weight /= 2
            acc += weight * mpmath.log(nrm)
        return float(acc)


def log_mahler_batch(coeffs: np.ndarray, cluster_min: int = 2, exact_rows=None, refine=None):
    """log M for each row of increasing-power coefficients.

    Rows may have trailing zeros (degree drop); all-zero rows give ``-inf``.
    ``exact_rows``, if given, is a callable ``i -> list of coefficients`` that
    supplies a more accurate coefficient list for row ``i`` when the row needs
    the multiprecision path.  ``refine``, if given, replaces that path
    entirely: ``i -> log M`` for row ``i``.

    Returns ``(logs, info)`` where ``info`` counts refined rows, rows with a
    root within ``NEAR_CIRCLE`` of the unit circle and degenerate rows.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    B, D1 = coeffs.shape
    out = np.full(B, -math.inf)
    info = {"refined": 0, "near_circle": 0, "degenerate": 0, "fallback": 0}
    mags = np.abs(coeffs)
    scale = mags.max(axis=1)
    nonzero = mags > 1e-14 * scale[:, None]
    has_any = scale > 0
    info["degenerate"] = int(np.count_nonzero(~has_any))
    # effective degree and lowest nonzero power per row
    top = np.where(has_any, D1 - 1 - np.argmax(nonzero[:, ::-1], axis=1), -1)
    low = np.where(has_any, np.argmax(nonzero, axis=1), 0)
    for deg in np.unique(top[has_any]):
        rows = np.flatnonzero(top == deg)
        lead = coeffs[rows, deg]
        if deg == 0:
            out[rows] = np.log(np.abs(lead))
            continue
        for lo in np.unique(low[rows]):
            sub = rows[low[rows] == lo]
            lead_s = coeffs[sub, deg]
            if deg == lo:
                out[sub] = np.log(np.abs(lead_s))
                continue
            block = coeffs[sub, lo:deg + 1]
            roots, ok = aberth_batch(block)
            info["fallback"] += int(np.count_nonzero(~ok))
            mod = np.abs(roots)
            info["near_circle"] += int(np.count_nonzero(np.any(np.abs(mod - 1) < NEAR_CIRCLE, axis=1)))
            out[sub] = np.log(np.abs(lead_s)) + np.sum(np.log(np.maximum(mod, 1.0)), axis=1)
            suspect = clustered_on_circle(roots, cluster_min)
            for i in np.flatnonzero(suspect):
                row = sub[i]
                if refine is not None:
                    out[row] = refine(row)
                else:
                    exact = exact_rows(row) if exact_rows is not None else coeffs[row]
                    out[row] = graeffe_log_mahler(exact)
                info["refined"] += 1
    return out, info
