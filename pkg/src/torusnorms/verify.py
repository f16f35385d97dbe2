"""Inequality checks over polynomial corpora, sharpness scans and reports.

Each theorem ID maps to a function producing ``TheoremCheck`` records for one
corpus member.  A check passes when ``lhs / rhs <= 1 + slack``, with the slack
derived from the error estimates of the numerical functionals involved.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import constants as K
from ._parallel import map_ordered
from .norms import OrliczSpec, lp_norm, lp_norm_exact_even, mahler_measure, orlicz_luxemburg_norm
from .polynomial import Polynomial, coefficient_functionals, degree_profile, dilate, univariate
from .quadrature import BoxSubset, NormResult, QuadratureSpec, TWO_PI, identity, mean_on_box
from .symmetric import u_mn

EXACT_METHODS = {"exact-parseval", "exact-even-convolution", "exact-roots", "closed-form"}
SLACK_FLOOR = 1e-9
SLACK_FACTOR = 10.0
NEAR_FAIL = 0.999

DEFAULT_PS = (1.0, 2.0)
DEFAULT_PAIRS = ((1.0, 2.0), (2.0, 4.0), (0.5, 3.0))
DEFAULT_THETAS = (0.25, 0.5)


class VerificationError(ValueError):
    pass


@dataclass(frozen=True)
class CheckParams:
    ps: tuple = DEFAULT_PS
    pairs: tuple = DEFAULT_PAIRS
    thetas: tuple = DEFAULT_THETAS
    profile: str = "desk"

    def __post_init__(self):
        if self.profile not in ("desk", "reference"):
            raise VerificationError(f"unknown profile {self.profile!r}")
        if any(not p > 0 for p in self.ps):
            raise VerificationError("every p must be positive")
        if any(not 0 < p < q for p, q in self.pairs):
            raise VerificationError("every (p, q) pair needs 0 < p < q")
        if any(not 0 < t <= 1 for t in self.thetas):
            raise VerificationError("every theta must lie in (0, 1]")

    def quad(self, n: int) -> QuadratureSpec:
        if self.profile == "desk":
            return QuadratureSpec.desk(n)
        return QuadratureSpec.default(n)


@dataclass
class TheoremCheck:
    theorem_id: str
    params: dict
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    slack: float
    methods: tuple
    witness: str
    corpus_index: int
    error_estimates: tuple = ()
    polynomials: list = field(default_factory=list)

    def record(self) -> dict:
        rec = {
            "theorem_id": self.theorem_id,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "pass": self.passed,
            "methods": list(self.methods),
            "witness_hash": self.witness,
            "slack": self.slack,
            "corpus_index": self.corpus_index,
            "error_estimates": list(self.error_estimates),
        }
        if self.polynomials:
            rec["polynomials"] = self.polynomials
        return rec


@dataclass
class CheckRun:
    theorem_id: str
    checks: list
    checked: int
    skipped: list  # (corpus index, reason)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def empty(self) -> bool:
        return not self.checks

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]


class _Term:
    """A factor of one side of an inequality with its provenance."""

    __slots__ = ("value", "method", "rel_err")

    def __init__(self, value: float, method: str = "closed-form", rel_err: float = 0.0):
        self.value, self.method, self.rel_err = value, method, rel_err

    @classmethod
    def of(cls, res: NormResult, power: float = 1.0) -> "_Term":
        return cls(res.value ** power, res.method, abs(power) * res.relative_error)


def _side(*terms: _Term) -> _Term:
    value = math.prod(t.value for t in terms)
    method = "+".join(sorted({t.method for t in terms}))
    return _Term(value, method, sum(t.rel_err for t in terms))


def _make(theorem_id, params, lhs: _Term, rhs: _Term, P, index, extra_polys=()) -> TheoremCheck:
    if rhs.value > 0:
        ratio = lhs.value / rhs.value
    else:
        ratio = 1.0 if lhs.value == 0 else math.inf
    methods = tuple(sorted(set(lhs.method.split("+")) | set(rhs.method.split("+"))))
    errs = (lhs.rel_err, rhs.rel_err)
    if set(methods) <= EXACT_METHODS:
        slack = SLACK_FLOOR
    else:
        slack = max(SLACK_FLOOR, SLACK_FACTOR * sum(errs))
    passed = bool(ratio <= 1 + slack)
    polys = []
    if ratio > NEAR_FAIL:
        polys = [Q.to_dict() for Q in (P, *extra_polys)]
    witness = "+".join(Q.content_hash() for Q in (P, *extra_polys))
    return TheoremCheck(theorem_id, dict(params), lhs.value, rhs.value, ratio, passed, slack,
                        methods, witness, index, errs, polys)


# -- functionals with the profile's quadrature ---------------------------------------

class _Ctx:
    def __init__(self, params: CheckParams):
        self.params = params

    def lp(self, P: Polynomial, p: float) -> NormResult:
        return lp_norm(P, p, self.params.quad(P.n))

    def mahler(self, P: Polynomial) -> NormResult:
        return mahler_measure(P, self.params.quad(P.n))

    def orlicz(self, P: Polynomial, alpha: float) -> NormResult:
        quad = self.params.quad(P.n)
        return orlicz_luxemburg_norm(P, OrliczSpec(alpha, rel_tol=min(1e-8, quad.rel_tol)), quad)

    def box_l1(self, P: Polynomial, boxes) -> NormResult:
        return mean_on_box(P, identity, boxes, self.params.quad(P.n))


def _lam(p: float, m: int) -> float:
    return math.exp(K.log_lambda_gamma_form(p, m))


def canonical_boxes(n: int, theta: float):
    """Half torus in the first variable, a quarter box and a product box of measure theta."""
    full = (0.0, TWO_PI)
    half = BoxSubset(((0.0, math.pi),) + (full,) * (n - 1))
    if n >= 2:
        quarter = BoxSubset(((0.0, math.pi), (0.0, math.pi)) + (full,) * (n - 2))
    else:
        quarter = BoxSubset(((0.0, math.pi / 2),))
    side = TWO_PI * theta ** (1.0 / n)
    product = BoxSubset(((0.0, side),) * n)
    return [("half", half), ("quarter", quarter), ("product", product)]


# -- one function per theorem ID ----------------------------------------------------------

def _thm21(ctx, P, i, corpus):
    deg = max(degree_profile(P).total, 0)
    out = []
    for p, q in ctx.params.pairs:
        C = K.comparison_constants(p, q)[1]
        out.append(_make("thm21", {"p": p, "q": q, "deg": deg},
                         _Term.of(ctx.lp(P, q)), _side(_Term(C ** deg), _Term.of(ctx.lp(P, p))), P, i))
    return out


def _bayart(ctx, P, i, corpus):
    prof = degree_profile(P)
    if not prof.homogeneous:
        return "not homogeneous"
    out = []
    for p, q in ctx.params.pairs:
        C = K.comparison_constants(p, q)[0]
        out.append(_make("bayart", {"p": p, "q": q, "deg": prof.total},
                         _Term.of(ctx.lp(P, q)), _side(_Term(C ** prof.total), _Term.of(ctx.lp(P, p))), P, i))
    return out


def _weissler(ctx, P, i, corpus):
    out = []
    for p, q in ctx.params.pairs:
        r = math.sqrt(p / q)
        out.append(_make("weissler", {"p": p, "q": q, "r": r},
                         _Term.of(ctx.lp(dilate(P, r), q)), _Term.of(ctx.lp(P, p)), P, i))
    return out


def _nikolskii_factor(P, p, q):
    prof = degree_profile(P)
    prod = math.prod(max(d, 1) for d in prof.per_variable)
    return 2.0 ** P.n * prod ** (1 / p - 1 / q)


def _nikolskii(ctx, P, i, corpus):
    # higher exponent bounded by the lower one
    out = []
    for p, q in ctx.params.pairs:
        f = _nikolskii_factor(P, p, q)
        out.append(_make("nikolskii", {"p": p, "q": q},
                         _Term.of(ctx.lp(P, q)), _side(_Term(f), _Term.of(ctx.lp(P, p))), P, i))
    return out


def _nikolskii_printed(ctx, P, i, corpus):
    # the literal statement: lower exponent bounded by the higher one
    out = []
    for p, q in ctx.params.pairs:
        f = _nikolskii_factor(P, p, q)
        out.append(_make("nikolskii-printed", {"p": p, "q": q},
                         _Term.of(ctx.lp(P, p)), _side(_Term(f), _Term.of(ctx.lp(P, q))), P, i))
    return out


def _mahler_main(ctx, P, i, corpus):
    prof = degree_profile(P)
    M = _Term.of(ctx.mahler(P))
    out = []
    for p in ctx.params.ps:
        lam = math.prod(_lam(p, d) for d in prof.per_variable)
        out.append(_make("mahler-main", {"p": p, "d": list(prof.per_variable)},
                         _Term.of(ctx.lp(P, p)), _side(_Term(lam), M), P, i))
    return out


def _mahler_cor(ctx, P, i, corpus):
    m = degree_profile(P).max_partial
    M = _Term.of(ctx.mahler(P))
    return [_make("mahler-cor", {"p": p, "m": m},
                  _Term.of(ctx.lp(P, p)), _side(_Term(_lam(p, m) ** P.n), M), P, i)
            for p in ctx.params.ps]


def _orlicz(ctx, P, i, corpus):
    m = degree_profile(P).max_partial
    if m == 0:
        return "constant polynomial: psi_{1/m} undefined for m = 0"
    bound = (2.0 ** P.n * (math.e - 1)) ** m
    return [_make("orlicz", {"m": m, "alpha": 1 / m},
                  _Term.of(ctx.orlicz(P, 1 / m)), _side(_Term(bound), _Term.of(ctx.mahler(P))), P, i)]


def _partner(corpus, i, pred=None):
    N = len(corpus)
    for step in range(1, N):
        j = (i + step) % N
        if corpus[j].n == corpus[i].n and (pred is None or pred(corpus[j])):
            return j
    return None


def _product_lower(ctx, P, i, corpus):
    j = _partner(corpus, i)
    if j is None:
        return "no partner polynomial in the corpus"
    Q = corpus[j]
    m, k = degree_profile(P).max_partial, degree_profile(Q).max_partial
    PQ = P * Q
    out = []
    for p in ctx.params.ps:
        c = (_lam(p, m) * _lam(p, k)) ** (-P.n)
        out.append(_make("product-lower", {"p": p, "m": m, "k": k, "partner": j},
                         _side(_Term(c), _Term.of(ctx.lp(P, p)), _Term.of(ctx.lp(Q, p))),
                         _Term.of(ctx.lp(PQ, p)), P, i, (Q,)))
    c = (math.comb(2 * m, m) * math.comb(2 * k, k)) ** (-P.n / 2)
    lp_, lq, lpq = (coefficient_functionals(R)[2] for R in (P, Q, PQ))
    out.append(_make("product-lower", {"form": "coefficients", "m": m, "k": k, "partner": j},
                     _side(_Term(c), _Term(lp_, "exact-parseval"), _Term(lq, "exact-parseval")),
                     _Term(lpq, "exact-parseval"), P, i, (Q,)))
    return out


def _mahler_triangle(ctx, P, i, corpus):
    m = degree_profile(P).max_partial
    j = _partner(corpus, i, lambda Q: degree_profile(Q).max_partial == m)
    if j is None:
        return f"no partner with deg_inf = {m}"
    Q = corpus[j]
    lhs = _Term.of(ctx.mahler(P + Q))
    MP, MQ = ctx.mahler(P), ctx.mahler(Q)
    total = _Term(MP.value + MQ.value, "+".join(sorted({MP.method, MQ.method})),
                  (MP.error_estimate + MQ.error_estimate) / max(MP.value + MQ.value, 1e-300))
    out = [_make("mahler-triangle", {"m": m, "partner": j, "form": "binomial"},
                 lhs, _side(_Term(math.comb(2 * m, m) ** (P.n / 2)), total), P, i, (Q,))]
    if P.n == 1:
        out.append(_make("mahler-triangle", {"m": m, "partner": j, "form": "kappa-2^m"},
                         lhs, _side(_Term(2.0 ** m), total), P, i, (Q,)))
    return out


def _interpolation(ctx, P, i, corpus):
    m = degree_profile(P).max_partial
    out = []
    l1 = None
    for theta in ctx.params.thetas:
        C = K.interpolation_constant(theta)
        for name, box in canonical_boxes(P.n, theta):
            if box.measure < theta * (1 - 1e-12):
                continue
            l1 = l1 or _Term.of(ctx.lp(P, 1.0))
            lE = ctx.box_l1(P, box)
            for p in ctx.params.ps:
                rhs = _side(_Term(C * _lam(p, m) ** P.n), _Term(l1.value ** (1 - theta), l1.method, (1 - theta) * l1.rel_err),
                            _Term.of(lE, theta))
                out.append(_make("interpolation", {"p": p, "theta": theta, "box": name, "measure": box.measure, "m": m},
                                 _Term.of(ctx.lp(P, p)), rhs, P, i))
    return out or "no canonical box of measure >= theta"


def _geo_mean_lemma(ctx, P, i, corpus):
    M = _Term.of(ctx.mahler(P))
    out = []
    l1 = None
    seen = set()
    for theta in ctx.params.thetas:
        for name, box in canonical_boxes(P.n, theta):
            a = box.measure
            lA = ctx.box_l1(P, box)
            if (name, round(a, 12)) not in seen and a < 1:
                seen.add((name, round(a, 12)))
                lC = ctx.box_l1(P, box.complement())
                rhs = _side(_Term(K.interpolation_constant(a)), _Term.of(lA, a), _Term.of(lC, 1 - a))
                out.append(_make("geo-mean-lemma", {"form": "two-sets", "box": name, "measure": a},
                                 M, rhs, P, i))
            if a >= theta * (1 - 1e-12):
                l1 = l1 or _Term.of(ctx.lp(P, 1.0))
                rhs = _side(_Term(2.0), _Term(l1.value ** (1 - theta), l1.method, (1 - theta) * l1.rel_err),
                            _Term.of(lA, theta))
                out.append(_make("geo-mean-lemma", {"form": "constant-2", "box": name, "measure": a, "theta": theta},
                                 M, rhs, P, i))
    return out


def _undecided(c: TheoremCheck) -> bool:
    return c.slack > SLACK_FLOOR and 1 - c.slack < c.ratio


THEOREMS = {
    "thm21": _thm21,
    "bayart": _bayart,
    "weissler": _weissler,
    "nikolskii": _nikolskii,
    "nikolskii-printed": _nikolskii_printed,
    "mahler-main": _mahler_main,
    "mahler-cor": _mahler_cor,
    "orlicz": _orlicz,
    "product-lower": _product_lower,
    "mahler-triangle": _mahler_triangle,
    "interpolation": _interpolation,
    "geo-mean-lemma": _geo_mean_lemma,
}


def check_inequality(theorem_id: str, corpus, params: CheckParams | None = None,
                     threads: int | None = None) -> CheckRun:
    """Run one theorem over every corpus member; records follow corpus order."""
    if theorem_id not in THEOREMS:
        raise VerificationError(f"unknown theorem id {theorem_id!r}; known: {', '.join(THEOREMS)}")
    polys = list(getattr(corpus, "polynomials", corpus))
    if not polys:
        raise VerificationError("empty corpus")
    params = params or CheckParams()
    ctx = _Ctx(params)
    fine = _Ctx(replace(params, profile="reference"))
    fn = THEOREMS[theorem_id]

    def run(i):
        res = fn(ctx, polys[i], i, polys)
        # a desk verdict that rests on the slack is redone at reference accuracy
        if not isinstance(res, str) and params.profile == "desk" and any(_undecided(c) for c in res):
            res = fn(fine, polys[i], i, polys)
            for c in res:
                c.params["escalated"] = True
        return res

    results = map_ordered(run, range(len(polys)), threads)
    checks, skipped, checked = [], [], 0
    for i, res in enumerate(results):
        if isinstance(res, str):
            skipped.append((i, res))
        else:
            checked += 1
            checks.extend(res)
    return CheckRun(theorem_id, checks, checked, skipped)


# -- sharpness scans --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    family: str
    params: dict
    ratio: float
    details: dict

    def record(self) -> dict:
        return {"family": self.family, "params": self.params, "ratio": self.ratio, "details": self.details}


def weissler_margin(eps: float, r2: float) -> float:
    """``E|1 + eps r z|**4 - (E|1 + eps z|**2)**2`` in closed form.

    Positive values mean ``1 + eps z`` violates the L^2 to L^4 inequality at radius
    ``sqrt(r2)``.
    """
    return (1 + 4 * eps ** 2 * r2 + eps ** 4 * r2 ** 2) - (1 + eps ** 2) ** 2


def _scan_kwapien(grid):
    m, p, q = 2, 2, 4
    bound = K.kwapien_lower_bound(p, q, m).value
    rows = []
    for n in grid or (2, 4, 8, 16, 32):
        U = u_mn(m, int(n))
        lq, lp = lp_norm_exact_even(U, q), lp_norm_exact_even(U, p)
        ratio_norms = lq.value / lp.value
        rows.append(ScanRow("kwapien", {"m": m, "n": int(n), "p": p, "q": q}, ratio_norms / bound,
                            {"norm_ratio": ratio_norms, "gamma_ratio": bound,
                             "l2_squared": lp.value ** 2, "l2_squared_gap": 2.0 - lp.value ** 2}))
    return rows


def _scan_weissler(grid):
    eps, p, q = 0.05, 2, 4
    rows = []
    for r2 in grid or (0.45, 0.49, 0.5, 0.51, 0.55):
        P = univariate([1.0, eps])
        exact = lp_norm_exact_even(dilate(P, math.sqrt(r2)), q).value ** 4 - lp_norm_exact_even(P, p).value ** 4
        margin = weissler_margin(eps, r2)
        rows.append(ScanRow("weissler-violation", {"eps": eps, "r2": r2, "p": p, "q": q}, margin,
                            {"margin_exact_even": exact, "violated": margin > 0}))
    return rows


def _scan_arestov(grid, p: float = 1.0):
    rows = []
    for m in grid or range(1, 7):
        P = univariate([math.comb(int(m), k) for k in range(int(m) + 1)])
        norm = lp_norm(P, p)
        M = mahler_measure(P)
        lam = K.arestov_lambda(p, int(m)).value
        rows.append(ScanRow("arestov-sharp", {"m": int(m), "p": p}, norm.value / (lam * M.value),
                            {"norm": norm.value, "lambda": lam, "mahler": M.value, "method": norm.method}))
    return rows


SCANS = {"kwapien": _scan_kwapien, "weissler-violation": _scan_weissler, "arestov-sharp": _scan_arestov}


def sharpness_scan(family: str, grid=None, **kw) -> list:
    if family not in SCANS:
        raise VerificationError(f"unknown scan family {family!r}; known: {', '.join(SCANS)}")
    return SCANS[family](grid, **kw)


# -- reports ---------------------------------------------------------------------------------

CSV_COLUMNS = ("theorem_id", "params", "lhs", "rhs", "ratio", "pass", "methods", "witness_hash")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def render_report(checks, fmt: str) -> str:
    checks = list(checks)
    if not checks:
        raise VerificationError("nothing to report")
    records = [c.record() for c in checks]
    if fmt == "json":
        return json.dumps(records, sort_keys=True, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([r["theorem_id"], _dumps(r["params"]), repr(r["lhs"]), repr(r["rhs"]), repr(r["ratio"]),
                        "true" if r["pass"] else "false", "+".join(r["methods"]), r["witness_hash"]])
        return buf.getvalue()
    raise VerificationError(f"unknown report format {fmt!r}")


def emit_report(checks, fmt: str, path) -> Path:
    path = Path(path)
    text = render_report(checks, fmt)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def read_report(path) -> list:
    """Records of a JSON report."""
    return json.loads(Path(path).read_text())
