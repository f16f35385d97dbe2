"""Symmetric polynomials, the Newton identities and the normalized family U_{m,n}.

``U_{m,n}(z) = m! e_m(z / sqrt(n))`` tends in distribution (for Steinhaus
variables) to a Hermite-type limit whose moments are Gamma values; the helpers
here give exact finite-n quantities and Monte Carlo moment estimates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._parallel import map_ordered
from .polynomial import Polynomial, build, constant, evaluate_points, from_arrays, zero
from .quadrature import NormResult

NEWTON_MAX_K = 8
UMN_MAX_TERMS = 2_000_000


def power_sum(k: int, n: int) -> Polynomial:
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    return build(n, [(tuple(k if i == j else 0 for i in range(n)), 1) for j in range(n)])


def elementary_symmetric(k: int, n: int) -> Polynomial:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return from_arrays(n, _multiaffine_exponents(k, n), np.ones(math.comb(n, k)), distinct=True)


def _multiaffine_exponents(k: int, n: int) -> np.ndarray:
    picks = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k)
    exps = np.zeros((len(picks), n), dtype=np.int64)
    np.put_along_axis(exps, picks, 1, axis=1)
    return exps


# -- Newton identities ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _e_in_power_sums(k: int, width: int) -> dict:
    """``e_k`` as ``{(j_1, ..., j_width): coefficient}``, meaning
    ``sum coefficient * p_1**j_1 * ... * p_width**j_width``.

    Newton-Girard: ``k e_k = sum_{i=1}^{k} (-1)**(i-1) e_{k-i} p_i``.
    """
    if k == 0:
        return {(0,) * width: Fraction(1)}
    out: dict = {}
    for i in range(1, k + 1):
        sign = 1 if i % 2 == 1 else -1
        for key, c in _e_in_power_sums(k - i, width).items():
            new = list(key)
            new[i - 1] += 1
            new = tuple(new)
            out[new] = out.get(new, Fraction(0)) + Fraction(sign, k) * c
    return {key: c for key, c in out.items() if c != 0}


@dataclass(frozen=True)
class NewtonDecomposition:
    """``k! e_k = p_1**k + w_k(p_1, ..., p_k)``.

    ``terms`` holds every ``(j, a_j)`` of the right-hand side, sorted, with
    ``j = (j_1, ..., j_k)`` exponents of ``p_1, ..., p_k``; ``residual`` is the
    largest coefficient of ``k! e_{k,k}`` minus the expanded right-hand side.
    """

    k: int
    terms: tuple
    residual: float

    @property
    def w_terms(self) -> tuple:
        lead = (self.k,) + (0,) * (self.k - 1)
        return tuple(t for t in self.terms if t[0] != lead)

    def expand(self, n: int) -> Polynomial:
        """The right-hand side as a polynomial in ``n`` variables."""
        ps = [power_sum(i, n) for i in range(1, self.k + 1)]
        total = zero(n)
        for js, a in self.terms:
            term = constant(n, float(a))
            for p, j in zip(ps, js):
                if j:
                    term = term * p ** j
            total = total + term
        return total

    def residual_at(self, n: int) -> float:
        diff = self.expand(n) - constant(n, math.factorial(self.k)) * elementary_symmetric(self.k, n)
        return max((abs(c) for _, c in diff.terms), default=0.0)


def newton_decompose(k: int) -> NewtonDecomposition:
    if not 1 <= k <= NEWTON_MAX_K:
        raise ValueError(f"k must be in 1..{NEWTON_MAX_K}, got {k}")
    fact = math.factorial(k)
    terms = tuple(sorted((key, c * fact) for key, c in _e_in_power_sums(k, k).items()))
    dec = NewtonDecomposition(k, terms, 0.0)
    return NewtonDecomposition(k, terms, dec.residual_at(k))


# -- the family U_{m,n} -----------------------------------------------------------------

def u_mn_coefficient(m: int, n: int) -> float:
    return math.exp(math.lgamma(m + 1) - m / 2 * math.log(n))


def u_mn(m: int, n: int) -> Polynomial:
    """``m! e_m(z_1/sqrt(n), ..., z_n/sqrt(n))`` expanded (at most 2e6 terms)."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if math.comb(n, m) > UMN_MAX_TERMS:
        raise ValueError(f"U_{{{m},{n}}} has {math.comb(n, m)} terms; use UmnEvaluator")
    c = u_mn_coefficient(m, n)
    return from_arrays(n, _multiaffine_exponents(m, n), np.full(math.comb(n, m), c), distinct=True)


class UmnEvaluator:
    """Evaluates ``U_{m,n}`` at points without expanding it.

    ``e_0..e_m`` are accumulated one variable at a time:
    ``e_j <- e_j + z_i e_{j-1}``.
    """

    def __init__(self, m: int, n: int):
        if not 1 <= m <= n:
            raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
        self.m, self.n = m, n

    def __call__(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=complex)
        E = np.zeros((Z.shape[0], self.m + 1), dtype=complex)
        E[:, 0] = 1.0
        for i in range(self.n):
            E[:, 1:] = E[:, 1:] + Z[:, i:i + 1] * E[:, :-1]
        return u_mn_coefficient(self.m, self.n) * E[:, self.m]


# -- Steinhaus Monte Carlo ----------------------------------------------------------------

@dataclass(frozen=True)
class SteinhausMCSpec:
    samples: int
    seed: int
    batch: int = 100

    def __post_init__(self):
        if self.samples < 100:
            raise ValueError("need at least 100 samples")
        if not 2 <= self.batch <= self.samples:
            raise ValueError("batch count must lie in [2, samples]")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def steinhaus_moment_mc(P, p: float, spec: SteinhausMCSpec, n: int | None = None) -> NormResult:
    """Estimate ``E|P(z)|**p`` for independent uniform phases ``z_j``.

    ``P`` is a :class:`Polynomial` or a callable on ``(S, n)`` point arrays (then
    ``n`` is required).  Batch ``b`` draws from a generator seeded with
    ``(seed, b)``; the error estimate is the batch-means standard error.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    if isinstance(P, Polynomial):
        n = P.n
        fn = lambda Z: evaluate_points(P, Z)
    else:
        if n is None:
            raise ValueError("n is required when P is a callable")
        fn = P
    sizes = [spec.samples // spec.batch + (1 if b < spec.samples % spec.batch else 0)
             for b in range(spec.batch)]

    def one(b):
        rng = np.random.default_rng([spec.seed, b])
        Z = np.exp(2j * np.pi * rng.random((sizes[b], n)))
        return float(np.mean(np.abs(fn(Z)) ** p))

    means = np.array(map_ordered(one, range(spec.batch)))
    weights = np.array(sizes, dtype=float) / spec.samples
    est = float(np.dot(weights, means))
    se = float(np.std(means, ddof=1) / math.sqrt(spec.batch))
    return NormResult(est, "monte-carlo", se, True,
                      {"samples": spec.samples, "batches": spec.batch, "seed": spec.seed})
