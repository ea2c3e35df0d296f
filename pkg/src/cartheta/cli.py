"""Command-line front end.  Every verb prints one JSON document on stdout.

Exit codes: 0 success / ISOMORPHIC, 1 failure / NOT_ISOMORPHIC, 2 parse error,
3 domain error, 4 incompatible denominators, 5 UNDECIDED.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import car, classify, fibers, graded, torus
from .errors import (
    CarThetaError,
    DimensionMismatch,
    DomainError,
    IncompatibleCyclicGrading,
    IncompatibleDenominator,
    IndexOutOfRange,
    InsufficientBound,
    NotApplicable,
    ParseError,
    SizeLimit,
)
from .numerics import PHASE_TOL, matmul, parse_real, residual, scale
from .selftest import run_selftest

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DOMAIN, EXIT_INCOMPATIBLE, EXIT_UNDECIDED = 0, 1, 2, 3, 4, 5

_STATUS_EXIT = {
    classify.ISOMORPHIC: EXIT_OK,
    classify.NOT_ISOMORPHIC: EXIT_FAIL,
    classify.UNDECIDED: EXIT_UNDECIDED,
}


def default_tol() -> float:
    raw = os.environ.get("CAR_THETA_TOL")
    if raw is None:
        return PHASE_TOL
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"CAR_THETA_TOL={raw!r} is not a number") from None


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def load_theta(path: str) -> graded.SkewMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})") from None
    return graded.SkewMatrix.from_json(doc)


def parse_point(text: str) -> List:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise ParseError("empty point")
    return [parse_real(p) for p in parts]


# ---------------------------------------------------------------------------
# verbs


def run_fiber(args) -> int:
    theta = load_theta(args.theta)
    if args.grid is not None:
        pts = fibers.grid_points(theta.n, parse_real(args.grid))
        _emit([fibers.fiber_descriptor(theta, p).to_json() for p in pts])
        return EXIT_OK
    if args.x is None:
        raise ParseError("fiber needs --x or --grid")
    x = parse_point(args.x)
    if len(x) != theta.n:
        raise DomainError(f"--x has {len(x)} coordinates, Theta is {theta.n}x{theta.n}")
    _emit(fibers.fiber_descriptor(theta, x).to_json())
    return EXIT_OK


def run_verify(args) -> int:
    theta = load_theta(args.theta)
    x = parse_point(args.x)
    if len(x) != theta.n:
        raise DomainError(f"--x has {len(x)} coordinates, Theta is {theta.n}x{theta.n}")
    tol = args.tol if args.tol is not None else default_tol()
    rep = car.build_tau_x(theta, x, args.q)
    rel = car.verify_car_relations(rep, tol)
    spectra = car.number_operator_spectra(rep, tol=max(tol, 1e-10))
    passed = rel.passed and spectra.passed
    _emit({
        "fiber": fibers.fiber_descriptor(theta, rep.x).to_json(),
        "dim": rep.dim,
        "torusDenominator": rep.torus_denominator,
        "relations": rel.to_json(),
        "spectra": spectra.to_json(),
        "passed": passed,
    })
    return EXIT_OK if passed else EXIT_FAIL


def run_classify2(args) -> int:
    t1 = args.theta1 if args.theta1 is not None else args.values[0] if args.values else None
    t2 = args.theta2 if args.theta2 is not None else args.values[1] if len(args.values) > 1 else None
    if t1 is None or t2 is None:
        raise ParseError("classify2 needs two values")
    verdict = classify.classify_n2(parse_real(t1), parse_real(t2), default_tol())
    _emit(verdict.to_json())
    return _STATUS_EXIT[verdict.status]


def run_classify(args) -> int:
    verdict = classify.classification_report(load_theta(args.theta1), load_theta(args.theta2), default_tol())
    _emit(verdict.to_json())
    return _STATUS_EXIT[verdict.status]


def run_trace_range(args) -> int:
    theta = parse_real(args.theta)
    if not isinstance(theta, Fraction):
        raise ParseError("trace ranges need an exact rational theta (p/q)")
    if args.distinguish is not None:
        _emit(torus.distinguish_lemma85(theta, args.distinguish, args.bound).to_json())
    else:
        _emit(torus.trace_range(theta, args.halvings, args.bound).to_json())
    return EXIT_OK


def run_deform_check(args) -> int:
    theta = load_theta(args.theta)
    tol = default_tol()
    rng = np.random.default_rng(args.seed)
    law, back = 0.0, 0.0
    for _ in range(args.count):
        space = graded.random_graded_space(theta.n, int(rng.integers(2, 7)), rng)
        i, j, k = (int(v) for v in rng.integers(0, space.dim, size=3))
        p, q = space.difference(i, j), space.difference(j, k)
        a = graded.random_homogeneous(space, p, rng, exact=theta.exact)
        b = graded.random_homogeneous(space, q, rng, exact=theta.exact)
        tw = lambda m: graded.twist_matrix(m, space, theta)  # noqa: E731
        ph = graded.homogeneous_phase(theta, p, q)
        law = max(law, residual(matmul(tw(a), tw(b)), scale(ph, tw(matmul(a, b)))))
        back = max(back, graded.check_double_deformation(graded.decompose_homogeneous(a, space), theta))
    passed = law <= tol and back <= tol
    _emit({"count": args.count, "seed": args.seed, "productLawResidual": law,
           "doubleDeformationResidual": back, "tol": tol, "passed": passed})
    return EXIT_OK if passed else EXIT_FAIL


def run_selftest_cmd(args) -> int:
    report = run_selftest(args.seed, args.iters)
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cartheta", description="Theta-deformed CAR algebras at desk scale")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("fiber", help="fiber descriptor at a hypercube point")
    p.add_argument("--theta", required=True, help="Theta JSON file")
    p.add_argument("--x", help='point, e.g. "0,1/4"')
    p.add_argument("--grid", help="sweep [0,1/2]^n with this step and emit an array")
    p.set_defaults(func=run_fiber)

    p = sub.add_parser("verify", help="build tau_x and check the relations and spectra")
    p.add_argument("--theta", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--q", type=int, help="torus denominator (default: that of Sigma)")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("classify2", help="two-generator isomorphism test")
    p.add_argument("values", nargs="*", help="theta1 theta2")
    p.add_argument("--theta1")
    p.add_argument("--theta2")
    p.set_defaults(func=run_classify2)

    p = sub.add_parser("classify", help="general isomorphism report")
    p.add_argument("--theta1", required=True)
    p.add_argument("--theta2", required=True)
    p.set_defaults(func=run_classify)

    p = sub.add_parser("trace-range", help="trace-range sets")
    p.add_argument("--theta", required=True)
    p.add_argument("--halvings", type=int, default=0)
    p.add_argument("--bound", type=int)
    p.add_argument("--distinguish", type=int, metavar="N", help="compare the three face fibers for n = N")
    p.set_defaults(func=run_trace_range)

    p = sub.add_parser("deform-check", help="random checks of the twisted product law")
    p.add_argument("--theta", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=run_deform_check)

    p = sub.add_parser("selftest", help="seeded invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=10)
    p.set_defaults(func=run_selftest_cmd)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        code, err = EXIT_PARSE, exc
    except (IncompatibleDenominator, IncompatibleCyclicGrading) as exc:
        code, err = EXIT_INCOMPATIBLE, exc
    except (DomainError, IndexOutOfRange, DimensionMismatch, InsufficientBound, NotApplicable, SizeLimit) as exc:
        code, err = EXIT_DOMAIN, exc
    except CarThetaError as exc:
        code, err = EXIT_DOMAIN, exc
    except ValueError as exc:
        code, err = EXIT_PARSE, exc
    print(f"error: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
