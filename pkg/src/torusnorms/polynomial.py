"""Sparse polynomials in n complex variables.

A polynomial is stored as a sorted tuple of ``(alpha, coefficient)`` pairs,
where ``alpha`` is a tuple of non-negative exponents of length ``n`` and the
coefficient is a Python complex.  Exactly-zero coefficients are never stored,
so two polynomials compare equal iff their canonical term sets are equal.

Example
-------
>>> P = build(2, [((1, 1), 3), ((0, 0), 4)])
>>> P.terms
(((0, 0), (4+0j)), ((1, 1), (3+0j)))
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MultiIndex = tuple  # tuple[int, ...]


class PolynomialError(ValueError):
    """Raised on malformed polynomial input (bad exponents, dimension clash)."""


@dataclass(frozen=True)
class DegreeProfile:
    total: int
    per_variable: tuple
    max_partial: int
    homogeneous: bool

    @property
    def is_zero(self) -> bool:
        return self.total < 0


def _zero_profile(n: int) -> DegreeProfile:
    return DegreeProfile(total=-1, per_variable=(-1,) * n, max_partial=-1,
                         homogeneous=False)


class Polynomial:
    """Immutable sparse polynomial; construct with :func:`build`."""

    __slots__ = ("n", "terms", "_hash", "_arrays")

    def __init__(self, n: int, terms: tuple):
        # trusted constructor: terms already canonical
        self.n = n
        self.terms = terms
        self._hash = None
        self._arrays = None

    # -- basic protocol -------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.terms))
        return self._hash

    def __repr__(self):
        if not self.terms:
            return f"Polynomial(n={self.n}, 0)"
        parts = []
        for alpha, c in self.terms:
            mono = "*".join(f"z{j + 1}^{a}" if a > 1 else f"z{j + 1}"
                            for j, a in enumerate(alpha) if a)
            parts.append(f"({c:g})" + (f"*{mono}" if mono else ""))
        return f"Polynomial(n={self.n}, " + " + ".join(parts) + ")"

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolynomialError("negative powers are not polynomials")
        result = constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            k >>= 1
            if k:
                base = mul(base, base)
        return result

    # -- views ----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return dict(self.terms).get(tuple(alpha), 0j)

    def arrays(self):
        """Exponents as an int array ``(T, n)`` and coefficients ``(T,)``."""
        if self._arrays is None:
            if self.terms:
                exps = np.array([a for a, _ in self.terms], dtype=np.int64)
                coefs = np.array([c for _, c in self.terms], dtype=complex)
            else:
                exps = np.zeros((0, self.n), dtype=np.int64)
                coefs = np.zeros(0, dtype=complex)
            exps.setflags(write=False)
            coefs.setflags(write=False)
            self._arrays = (exps, coefs)
        return self._arrays

    def dense(self) -> np.ndarray:
        """Coefficient tensor of shape ``(d_1+1, ..., d_n+1)``."""
        exps, coefs = self.arrays()
        shape = tuple(int(d) + 1 for d in exps.max(axis=0)) if len(coefs) else (1,) * self.n
        out = np.zeros(shape, dtype=complex)
        if len(coefs):
            out[tuple(exps.T)] = coefs
        return out

    def __call__(self, *z):
        """Evaluate at a point (or broadcastable arrays) ``z_1, ..., z_n``."""
        if len(z) != self.n:
            raise PolynomialError(f"expected {self.n} arguments, got {len(z)}")
        zs = [np.asarray(v, dtype=complex) for v in z]
        total = np.zeros(np.broadcast(*zs).shape, dtype=complex) if zs else 0j
        for alpha, c in self.terms:
            mono = c
            for v, a in zip(zs, alpha):
                if a:
                    mono = mono * v ** a
            total = total + mono
        return total[()] if isinstance(total, np.ndarray) and total.ndim == 0 else total

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"alpha": list(alpha), "re": float(c.real), "im": float(c.imag)}
                      for alpha, c in self.terms],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def _canonical(n: int, accum: dict) -> Polynomial:
    terms = tuple(sorted((a, complex(c)) for a, c in accum.items() if c != 0))
    return Polynomial(n, terms)


def build(n: int, raw_terms: Iterable) -> Polynomial:
    """Canonical polynomial from ``(multi_index, coefficient)`` pairs.

    Duplicate multi-indices are summed and zero coefficients dropped.
    """
    if int(n) != n or n < 1:
        raise PolynomialError(f"variable count must be a positive integer, got {n!r}")
    accum: dict = {}
    for alpha, c in raw_terms:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != n:
            raise PolynomialError(f"multi-index {alpha} has length {len(alpha)}, expected {n}")
        if any(a < 0 for a in alpha):
            raise PolynomialError(f"negative exponent in multi-index {alpha}")
        accum[alpha] = accum.get(alpha, 0j) + complex(c)
    return _canonical(n, accum)


def from_arrays(n: int, exps, coefs, distinct: bool = False) -> Polynomial:
    """Canonical polynomial from an exponent array ``(T, n)`` and coefficients ``(T,)``.

    Pass ``distinct=True`` when the exponent rows are known to be distinct.
    """
    exps = np.asarray(exps, dtype=np.int64).reshape(-1, n)
    coefs = np.asarray(coefs, dtype=complex).ravel()
    if exps.shape[0] != coefs.shape[0]:
        raise PolynomialError("exponent and coefficient arrays differ in length")
    if exps.size and exps.min() < 0:
        raise PolynomialError("negative exponent")
    if not distinct and len(coefs):
        exps, coefs = _combine_rows(exps, coefs)
    keep = coefs != 0
    exps, coefs = exps[keep], coefs[keep]
    # lexicographic row order, the same order as sorting the tuples
    order = np.lexsort(exps.T[::-1]) if len(coefs) else np.zeros(0, dtype=np.int64)
    exps, coefs = np.ascontiguousarray(exps[order]), coefs[order]
    P = Polynomial(n, tuple(zip(map(tuple, exps.tolist()), coefs.tolist())))
    exps.setflags(write=False)
    coefs.setflags(write=False)
    P._arrays = (exps, coefs)
    return P


def constant(n: int, c: complex) -> Polynomial:
    return build(n, [((0,) * n, c)])


def zero(n: int) -> Polynomial:
    return Polynomial(n, ())


def variable(n: int, j: int) -> Polynomial:
    """The coordinate polynomial ``z_j`` (0-based ``j``)."""
    alpha = [0] * n
    alpha[j] = 1
    return build(n, [(alpha, 1)])


def univariate(coeffs: Sequence[complex]) -> Polynomial:
    """One-variable polynomial from coefficients ordered by increasing power."""
    return build(1, [((k,), c) for k, c in enumerate(coeffs)])


def _check_same_n(P: Polynomial, Q: Polynomial):
    if P.n != Q.n:
        raise PolynomialError(f"dimension mismatch: {P.n} vs {Q.n}")


def add(P: Polynomial, Q: Polynomial) -> Polynomial:
    _check_same_n(P, Q)
    accum = dict(P.terms)
    for alpha, c in Q.terms:
        accum[alpha] = accum.get(alpha, 0j) + c
    return _canonical(P.n, accum)


def scale(P: Polynomial, c: complex) -> Polynomial:
    c = complex(c)
    return _canonical(P.n, {a: v * c for a, v in P.terms})


def mul(P: Polynomial, Q: Polynomial) -> Polynomial:
    """Product by convolution of the term sets (vectorized over term pairs)."""
    _check_same_n(P, Q)
    if P.is_zero or Q.is_zero:
        return zero(P.n)
    exps, coefs = convolve_terms(*P.arrays(), *Q.arrays())
    return from_arrays(P.n, exps, coefs, distinct=True)


def convolve_terms(ep, cp, eq, cq):
    """Exponent/coefficient arrays of the product of two term arrays.

    The result has distinct exponent rows in no particular order and may hold
    coefficients that cancelled to zero.
    """
    n = ep.shape[1]
    # mixed-radix encoding of exponent vectors; radix large enough for the sum
    radix = [int(r) for r in ep.max(axis=0) + eq.max(axis=0) + 1]
    if math.prod(radix) >= 2 ** 62:
        return _convolve_rows(ep, cp, eq, cq)
    place = np.ones(n, dtype=np.int64)
    for j in range(n - 2, -1, -1):
        place[j] = place[j + 1] * radix[j + 1]
    radix = np.array(radix, dtype=np.int64)
    codes = (ep @ place)[:, None] + (eq @ place)[None, :]
    prods = (cp[:, None] * cq[None, :]).ravel()
    uniq, inverse = np.unique(codes.ravel(), return_inverse=True)
    re = np.bincount(inverse, weights=prods.real, minlength=len(uniq))
    im = np.bincount(inverse, weights=prods.imag, minlength=len(uniq))
    exps = (uniq[:, None] // place[None, :]) % radix[None, :]
    return exps, re + 1j * im


def _combine_rows(keys: np.ndarray, vals: np.ndarray):
    """Sum ``vals`` over equal rows of the 2-D integer array ``keys``."""
    view = np.ascontiguousarray(keys).view(np.dtype((np.void, keys.dtype.itemsize * keys.shape[1])))
    uniq, inverse = np.unique(view.ravel(), return_inverse=True)
    re = np.bincount(inverse, weights=vals.real, minlength=len(uniq))
    im = np.bincount(inverse, weights=vals.imag, minlength=len(uniq))
    return uniq.view(keys.dtype).reshape(-1, keys.shape[1]), re + 1j * im


def _convolve_rows(ep, cp, eq, cq, budget: int = 1 << 25):
    # many variables: exponent rows are compared as raw bytes, in chunks of P's terms
    n = ep.shape[1]
    top = int(ep.max() + eq.max())
    dtype = np.uint8 if top < 2 ** 8 else np.uint16 if top < 2 ** 16 else np.int64
    ep, eq = ep.astype(dtype), eq.astype(dtype)
    step = max(1, budget // (len(cq) * n * np.dtype(dtype).itemsize))
    keys, vals = [], []
    for start in range(0, len(cp), step):
        sums = (ep[start:start + step, None, :] + eq[None, :, :]).reshape(-1, n)
        prods = (cp[start:start + step, None] * cq[None, :]).ravel()
        k, v = _combine_rows(sums, prods)
        keys.append(k)
        vals.append(v)
    k, v = _combine_rows(np.concatenate(keys), np.concatenate(vals))
    return k.astype(np.int64), v


def power_coefficients(P: Polynomial, k: int) -> np.ndarray:
    """Coefficients of ``P**k`` (unordered, zeros possible) without building it."""
    if k < 1:
        raise PolynomialError("power must be >= 1")
    exps, coefs = P.arrays()
    be, bc = exps, coefs
    for _ in range(k - 1):
        be, bc = convolve_terms(be, bc, exps, coefs)
    return bc


def _mul_dict(P: Polynomial, Q: Polynomial) -> Polynomial:
    accum: dict = {}
    for a, c in P.terms:
        for b, d in Q.terms:
            key = tuple(x + y for x, y in zip(a, b))
            accum[key] = accum.get(key, 0j) + c * d
    return _canonical(P.n, accum)


def degree_profile(P: Polynomial) -> DegreeProfile:
    if P.is_zero:
        return _zero_profile(P.n)
    exps, _ = P.arrays()
    sums = exps.sum(axis=1)
    total = int(sums.max())
    per_variable = tuple(int(d) for d in exps.max(axis=0))
    return DegreeProfile(
        total=total,
        per_variable=per_variable,
        max_partial=max(per_variable),
        homogeneous=bool(np.all(sums == total)),
    )


def partial_substitute(P: Polynomial, j: int, values: Sequence[complex]) -> Polynomial:
    """Fix every variable except ``z_j`` (0-based) and return the univariate slice.

    ``values`` lists the fixed values of the remaining ``n - 1`` variables in
    their natural order.
    """
    if not 0 <= j < P.n:
        raise PolynomialError(f"variable index {j} out of range for n={P.n}")
    values = list(values)
    if len(values) != P.n - 1:
        raise PolynomialError(f"expected {P.n - 1} fixed values, got {len(values)}")
    fixed = values[:j] + [None] + values[j:]
    accum: dict = {}
    for alpha, c in P.terms:
        for k, (a, v) in enumerate(zip(alpha, fixed)):
            if k != j and a:
                c = c * complex(v) ** a
        accum[(alpha[j],)] = accum.get((alpha[j],), 0j) + c
    return _canonical(1, accum)


def evaluate_points(P: Polynomial, Z, chunk: int = 1 << 22) -> np.ndarray:
    """Values of ``P`` at the rows of ``Z`` (shape ``(S, n)``).

    All powers ``z_j**e`` sit side by side in one table; each term multiplies
    only the entries for its nonzero exponents.  Points and terms are taken in
    blocks so memory stays near ``chunk`` complex numbers.
    """
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim != 2 or Z.shape[1] != P.n:
        raise PolynomialError(f"expected points of shape (S, {P.n}), got {Z.shape}")
    out = np.zeros(Z.shape[0], dtype=complex)
    if P.is_zero:
        return out
    exps, coefs = P.arrays()
    deg = exps.max(axis=0)
    offsets = np.concatenate([[0], np.cumsum(deg + 1)[:-1]])
    width = int(np.sum(deg + 1))
    rows, cols = np.nonzero(exps)
    K = max(1, int(np.bincount(rows, minlength=len(coefs)).max()) if len(rows) else 1)
    # column 0 holds z_1**0 = 1, the padding for terms with fewer factors
    idx = np.zeros((len(coefs), K), dtype=np.int64)
    rank = np.arange(len(rows)) - np.searchsorted(rows, rows)
    idx[rows, rank] = offsets[cols] + exps[rows, cols]
    srows = max(1, min(Z.shape[0], chunk // width))
    for s0 in range(0, Z.shape[0], srows):
        Zs = Z[s0:s0 + srows]
        table = np.concatenate([Zs[:, j:j + 1] ** np.arange(int(deg[j]) + 1) for j in range(P.n)], axis=1)
        step = max(1, chunk // (len(Zs) * K))
        for start in range(0, len(coefs), step):
            ib = idx[start:start + step]
            block = table[:, ib[:, 0]] * coefs[start:start + step]
            for k in range(1, K):
                block *= table[:, ib[:, k]]
            out[s0:s0 + srows] += block.sum(axis=1)
    return out


def dilate(P: Polynomial, r: float) -> Polynomial:
    """``P(r z)``: each coefficient picks up ``r ** |alpha|``."""
    if not r > 0:
        raise PolynomialError(f"dilation factor must be positive, got {r}")
    return _canonical(P.n, {a: c * r ** sum(a) for a, c in P.terms})


def coefficient_functionals(P: Polynomial):
    """Return ``(L, H, l2)``: sum, max and Euclidean norm of coefficient moduli."""
    if P.is_zero:
        return 0.0, 0.0, 0.0
    mods = np.abs(P.arrays()[1])
    return float(mods.sum()), float(mods.max()), float(np.sqrt(np.sum(mods ** 2)))


def allclose(P: Polynomial, Q: Polynomial, rel: float = 1e-12) -> bool:
    """Structural comparison with a relative coefficient tolerance.

    Coefficients below ``rel`` times the largest coefficient count as zero.
    """
    if P.n != Q.n:
        return False
    scale_ = max(coefficient_functionals(P)[1], coefficient_functionals(Q)[1], 1e-300)
    a, b = dict(P.terms), dict(Q.terms)
    for key in set(a) | set(b):
        if abs(a.get(key, 0j) - b.get(key, 0j)) > rel * scale_:
            return False
    return True


def monomial_shear(P: Polynomial, inner: int, shear: int) -> Polynomial:
    """Substitute ``z_i -> z_i * z_inner**shear`` for every ``i != inner``.

    The map is a measure-preserving automorphism of the torus, so L^p norms
    and the Mahler measure are unchanged.  The result lists ``inner`` last.
    """
    order = [i for i in range(P.n) if i != inner] + [inner]
    accum = {}
    for alpha, c in P.terms:
        outer = [alpha[i] for i in order[:-1]]
        key = tuple(outer) + (alpha[inner] + shear * sum(outer),)
        accum[key] = c
    return _canonical(P.n, accum)


# -- JSON interchange ---------------------------------------------------------

def from_dict(data: dict) -> Polynomial:
    try:
        n = data["n"]
        raw = [(t["alpha"], complex(t["re"], t["im"])) for t in data["terms"]]
    except (KeyError, TypeError) as exc:
        raise PolynomialError(f"malformed polynomial JSON: {exc}") from exc
    return build(n, raw)


def from_json(text: str) -> Polynomial:
    return from_dict(json.loads(text))


def load(path) -> Polynomial:
    with open(path) as fh:
        return from_dict(json.load(fh))


def dump(P: Polynomial, path) -> None:
    with open(path, "w") as fh:
        fh.write(P.to_json())
        fh.write("\n")
