"""Seeded random polynomial corpora.

Polynomial ``i`` of a corpus is drawn from its own generator seeded with
``(seed, i)``, so corpora are reproducible item by item and a prefix of a
longer corpus equals the shorter corpus.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .polynomial import Polynomial, PolynomialError, build, degree_profile, from_dict

KINDS = ("general", "homogeneous", "multiaffine")
LAWS = ("gaussian", "rademacher", "steinhaus")
TERM_DENSITY = 0.5


@dataclass(frozen=True)
class CorpusSpec:
    seed: int
    n: int
    max_total_degree: int
    count: int
    kind: str = "general"
    coefficient_law: str = "gaussian"
    # fixed total degree for homogeneous and multiaffine kinds; drawn per item when None
    degree: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.max_total_degree < 0:
            raise ValueError("max_total_degree must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.coefficient_law not in LAWS:
            raise ValueError(f"unknown coefficient law {self.coefficient_law!r}")
        if self.degree is not None:
            if self.degree > self.max_total_degree:
                raise ValueError("degree exceeds max_total_degree")
            if self.kind == "multiaffine" and self.degree > self.n:
                raise ValueError(f"a multiaffine polynomial in {self.n} variables has degree <= {self.n}")
        if self.kind != "general" and self.max_total_degree < 1 and self.degree is None:
            raise ValueError(f"kind {self.kind!r} needs max_total_degree >= 1")

    def canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def _coefficients(rng: np.random.Generator, law: str, size: int) -> np.ndarray:
    if law == "gaussian":
        return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    if law == "rademacher":
        return rng.choice([-1.0, 1.0], size).astype(complex)
    return np.exp(2j * np.pi * rng.random(size))


def _monomials(n: int, degrees, multiaffine: bool = False):
    degrees = set(degrees)
    if multiaffine:
        cands = itertools.product((0, 1), repeat=n)
    else:
        cands = itertools.product(range(max(degrees) + 1), repeat=n)
    return [a for a in cands if sum(a) in degrees]


def random_polynomial(spec: CorpusSpec, kind: str | None = None, index: int = 0,
                      degree: int | None = None) -> Polynomial:
    """Item ``index`` of the corpus described by ``spec``.

    ``general``: every monomial of total degree at most ``d`` kept with
    probability one half, at least one of degree exactly ``d``, with ``d`` drawn
    from ``0..max_total_degree``.  ``homogeneous``: the same restricted to
    ``|alpha| = m``.  ``multiaffine``: exponents in ``{0, 1}`` with ``|alpha| = m``.
    """
    kind = kind or spec.kind
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    degree = spec.degree if degree is None else degree
    rng = np.random.default_rng([spec.seed, index])
    D = spec.max_total_degree
    if kind == "general":
        d = int(rng.integers(0, D + 1)) if degree is None else degree
        mons = _monomials(spec.n, range(d + 1))
    else:
        top = min(D, spec.n) if kind == "multiaffine" else D
        d = int(rng.integers(1, top + 1)) if degree is None else degree
        if kind == "multiaffine" and d > spec.n:
            raise PolynomialError(f"multiaffine degree {d} exceeds n = {spec.n}")
        mons = _monomials(spec.n, [d], multiaffine=(kind == "multiaffine"))
    keep = rng.random(len(mons)) < TERM_DENSITY
    top_idx = [i for i, a in enumerate(mons) if sum(a) == d]
    if not keep[top_idx].any():
        keep[top_idx[int(rng.integers(len(top_idx)))]] = True
    chosen = [a for a, k in zip(mons, keep) if k]
    coeffs = _coefficients(rng, spec.coefficient_law, len(chosen))
    # a Gaussian draw is never exactly zero; guard the other laws anyway
    coeffs[coeffs == 0] = 1.0
    return build(spec.n, zip(chosen, coeffs))


@dataclass
class Corpus:
    spec: CorpusSpec
    polynomials: list

    def manifest(self) -> dict:
        items = []
        for i, P in enumerate(self.polynomials):
            prof = degree_profile(P)
            items.append({"index": i, "hash": P.content_hash(), "terms": len(P.terms),
                          "total": prof.total, "per_variable": list(prof.per_variable),
                          "homogeneous": prof.homogeneous})
        return {"spec": asdict(self.spec), "spec_hash": self.spec.hash(), "items": items}

    def to_json(self) -> str:
        doc = {"manifest": self.manifest(),
               "polynomials": [P.to_dict() for P in self.polynomials]}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())


def generate_corpus(spec: CorpusSpec) -> Corpus:
    return Corpus(spec, [random_polynomial(spec, index=i) for i in range(spec.count)])


def load_corpus(path) -> Corpus:
    """Read a corpus file; a bare polynomial JSON file is a corpus of one."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise PolynomialError(f"cannot read corpus {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PolynomialError(f"{path} is not valid JSON: {exc}") from exc
    if "polynomials" not in doc:
        P = from_dict(doc)
        spec = CorpusSpec(seed=0, n=P.n, max_total_degree=max(degree_profile(P).total, 0), count=1)
        return Corpus(spec, [P])
    polys = [from_dict(d) for d in doc["polynomials"]]
    spec = CorpusSpec(**doc["manifest"]["spec"])
    return Corpus(spec, polys)
