"""Command-line front end.

Exit codes: 0 success (all checks pass), 1 a verification failed, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import constants as K
from .corpus import KINDS, LAWS, CorpusSpec, generate_corpus, load_corpus
from .norms import OrliczSpec, lp_norm, mahler_measure, orlicz_luxemburg_norm
from .polynomial import PolynomialError, load
from .quadrature import QuadratureSpec
from .verify import (CheckParams, SCANS, THEOREMS, VerificationError, check_inequality, emit_report,
                     sharpness_scan)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _print_result(label, res):
    print(json.dumps({"quantity": label, **res.to_dict()}, sort_keys=True))


def cmd_norm(args):
    P = load(args.poly)
    spec = QuadratureSpec.default(P.n)
    if args.tol is not None:
        spec = QuadratureSpec(spec.base_points_per_dim, spec.max_points_per_dim, args.tol)
    _print_result(f"L^{args.p:g} norm", lp_norm(P, args.p, spec))
    return EXIT_OK


def cmd_mahler(args):
    _print_result("Mahler measure", mahler_measure(load(args.poly)))
    return EXIT_OK


def cmd_orlicz(args):
    P = load(args.poly)
    _print_result(f"Luxemburg norm (alpha={args.alpha:g})", orlicz_luxemburg_norm(P, OrliczSpec(args.alpha)))
    return EXIT_OK


def cmd_lambda(args):
    L = K.arestov_lambda(args.p, args.m)
    print(f"Lambda({args.p:g}, {args.m})")
    print(f"  gamma form    {L.value_gamma_form:.15g}")
    print(f"  integral form {L.value_integral_form:.15g}")
    print(f"  relative gap  {L.consistency_gap:.3e}")
    return EXIT_OK


def cmd_corpus(args):
    spec = CorpusSpec(seed=args.seed, n=args.n, max_total_degree=args.deg, count=args.count,
                      kind=args.kind, coefficient_law=args.law, degree=args.degree)
    corpus = generate_corpus(spec)
    if args.out == "-":
        sys.stdout.write(corpus.to_json())
    else:
        corpus.save(args.out)
        print(f"wrote {spec.count} polynomials to {args.out} (spec {spec.hash()})")
    return EXIT_OK


def cmd_verify(args):
    corpus = load_corpus(args.corpus)
    kw = {"profile": args.profile}
    if args.q is not None:
        kw["pairs"] = ((args.p if args.p is not None else 1.0, args.q),)
    if args.p is not None:
        kw["ps"] = (args.p,)
    if args.theta is not None:
        kw["thetas"] = (args.theta,)
    run = check_inequality(args.theorem, corpus, CheckParams(**kw))
    status = "PASS" if run.passed else "FAIL"
    print(f"{args.theorem}: {status} checks={len(run.checks)} failures={len(run.failures)} "
          f"checked={run.checked} skipped={len(run.skipped)}")
    if run.empty:
        print(f"{args.theorem}: every corpus member violates the hypotheses; nothing checked", file=sys.stderr)
        return EXIT_USAGE
    worst = max(run.checks, key=lambda c: c.ratio)
    print(f"max ratio {worst.ratio:.12g} at corpus index {worst.corpus_index} {json.dumps(worst.params, sort_keys=True)}")
    if args.report:
        fmt = "csv" if args.report.endswith(".csv") else "json"
        emit_report(run.checks, fmt, args.report)
    return EXIT_OK if run.passed else EXIT_FAIL


def cmd_scan(args):
    grid = [float(x) for x in args.grid.split(",")] if args.grid else None
    rows = sharpness_scan(args.family, grid)
    for row in rows:
        print(json.dumps(row.record(), sort_keys=True))
    if args.report:
        with open(args.report, "w") as fh:
            json.dump([r.record() for r in rows], fh, sort_keys=True, indent=1)
            fh.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="torusnorms", description="Norms, Mahler measures and polynomial inequalities on the torus.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", help="L^p norm of a polynomial file")
    p.add_argument("--poly", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--tol", type=float, help="relative tolerance for the grid refinement")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("mahler", help="Mahler measure of a polynomial file")
    p.add_argument("--poly", required=True)
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("orlicz", help="Luxemburg norm for psi(t) = exp(t^alpha) - 1")
    p.add_argument("--poly", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.set_defaults(func=cmd_orlicz)

    p = sub.add_parser("lambda", help="Lambda(p, m) in gamma and integral form")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("corpus", help="generate a seeded polynomial corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--deg", type=int, required=True, help="maximal total degree")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--kind", choices=KINDS, default="general")
    p.add_argument("--law", choices=LAWS, default="gaussian")
    p.add_argument("--degree", type=int, help="fixed degree for homogeneous/multiaffine kinds")
    p.add_argument("--out", required=True, help="output path, or - for stdout")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("verify", help="check one inequality over a corpus")
    p.add_argument("--theorem", required=True, choices=sorted(THEOREMS))
    p.add_argument("--corpus", required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--profile", choices=("desk", "reference"), default="desk")
    p.add_argument("--report", help="write a .csv or .json report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="sharpness scan over a polynomial family")
    p.add_argument("--family", required=True, choices=sorted(SCANS))
    p.add_argument("--grid", help="comma-separated parameter values")
    p.add_argument("--report", help="write the rows as JSON")
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (PolynomialError, VerificationError, ValueError, OSError) as exc:
        print(f"torusnorms {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
