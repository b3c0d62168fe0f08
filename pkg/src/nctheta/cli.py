"""Command line: normal forms, verification suites and numeric experiments.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from .algebra import ball, even_sphere, format_element, odd_sphere, torus
from .clutching import (
    AmbiguousInvariant,
    ClutchingError,
    build_idempotent,
    classical_chern,
    idempotent_report,
    make_x_datum,
    recover_invariants,
)
from .field import BranchError, SingularFiberError, spectrum_c, winding, x_loop
from .parser import ParseError
from .phase import Theta
from .report import Report
from .suites import SUITES, run_suite
from .torus_rep import RieffelParams, clock_shift, matrix_to_json, rieffel_projection

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ALGEBRAS = {
    "s3": lambda m, tw: odd_sphere(m, tw),
    "s4": lambda m, tw: even_sphere(m, tw),
    "ball": lambda m, tw: ball(m, with_u=True, twist=tw),
    "torus": lambda m, tw: torus(m, tw),
}

TASKS = ("rieffel", "winding", "clutch", "spectrum-c", "chern")


class UsageError(ValueError):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nctheta", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    nf = sub.add_parser("nf", help="print the normal form of an element")
    nf.add_argument("expr")
    nf.add_argument("--algebra", choices=sorted(ALGEBRAS), default="s3")
    nf.add_argument("--m", type=int, default=2, help="number of generators z_1..z_m (default 2)")
    nf.add_argument("--swapped", action="store_true", help="use the opposite phase convention")

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    ver.add_argument("--p", type=int, default=3, help="retractions: numerator (default 3)")
    ver.add_argument("--q", type=int, default=8, help="retractions: denominator (default 8)")
    ver.add_argument("--out", type=Path, help="write the JSON report here")

    num = sub.add_parser("numeric", help="run a numeric experiment")
    num.add_argument("task", choices=TASKS)
    theta = num.add_argument_group("theta")
    theta.add_argument("--p", type=int)
    theta.add_argument("--q", type=int)
    theta.add_argument("--theta-float", type=float, help="irrational theta, replaced by a convergent")
    theta.add_argument("--q-max", type=int, default=89, help="largest convergent denominator (default 89)")
    num.add_argument("--eps", type=float, default=0.2,
                     help="Rieffel ramp width as a fraction of min(theta, 1-theta) (default 0.2)")
    num.add_argument("--loop", default="X^1", help="winding: loop X^s (default X^1)")
    num.add_argument("--grid", type=int, help="t-grid (winding 2048, spectrum-c 64, chern 1024)")
    num.add_argument("--check-drift", action="store_true", help="winding: also compare against grid doubling")
    num.add_argument("--n", type=int, default=1, help="clutch: rank")
    num.add_argument("--s", type=int, default=0, help="clutch and chern: index")
    num.add_argument("--cone-grid", type=int, default=128)
    num.add_argument("--equator-grid", type=int, default=5)
    num.add_argument("--theta-kind", choices=("irrational", "rational"), default="irrational",
                     help="clutch: semigroup used to normalize the recovered class (default irrational)")
    num.add_argument("--tol", type=float, help="override the task's primary tolerance")
    num.add_argument("--out", type=Path, help="write the JSON report here")
    num.add_argument("--artifact", type=Path, help="write the task's JSON artifact here")
    return ap


# -- helpers ---------------------------------------------------------------------


def _theta(args) -> tuple[Theta, int, int]:
    if args.theta_float is not None:
        if args.p is not None or args.q is not None:
            raise UsageError("give either --p/--q or --theta-float, not both")
        theta = Theta.irrational(args.theta_float)
    elif args.p is not None and args.q is not None:
        theta = Theta.rational(args.p, args.q)
    else:
        raise UsageError("theta needs --p and --q, or --theta-float")
    p, q = theta.convergent(args.q_max)
    if q < 2:
        raise UsageError(f"theta {theta} has no convergent with 2 <= q <= {args.q_max}")
    return theta, p, q


def _loop_power(text: str) -> int:
    m = re.fullmatch(r"\s*X\s*(?:\^\s*\(?\s*([+-]?\d+)\s*\)?)?\s*", text)
    if not m:
        raise UsageError(f"loop must look like X^s, got {text!r}")
    return int(m.group(1)) if m.group(1) else 1


def _write_json(path: Path | None, data: dict) -> None:
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _emit(report: Report, command: str, params: dict, start: float, out: Path | None) -> int:
    data = {
        "command": command,
        "params": params,
        "checks": [c.to_dict() for c in report.checks],
        "elapsed_ms": round((time.perf_counter() - start) * 1000.0, 3),
    }
    print(report.summary())
    _write_json(out, data)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- commands --------------------------------------------------------------------


def cmd_nf(args) -> int:
    pres = ALGEBRAS[args.algebra](args.m, -1 if args.swapped else 1)
    try:
        a = pres.parse(args.expr)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(format_element(a))
    return EXIT_OK


def cmd_verify(args) -> int:
    start = time.perf_counter()
    params = {"suite": args.suite}
    kwargs = {}
    if args.suite == "retractions":
        kwargs["rep"] = clock_shift(args.p, args.q)
        params.update(p=args.p, q=args.q)
    report = run_suite(args.suite, **kwargs)
    return _emit(report, "verify", params, start, args.out)


def _task_rieffel(args, p, q, params):
    tol = args.tol if args.tol is not None else 1e-8
    res = rieffel_projection(clock_shift(p, q), RieffelParams.default(p / q, args.eps))
    report = Report(f"rieffel projection at {p}/{q}")
    report.add(f"||P^2 - P|| <= {tol:g}", res.idempotency_residual <= tol, res.idempotency_residual)
    report.add(f"||P* - P|| <= {tol:g}", res.selfadjoint_residual <= tol, res.selfadjoint_residual)
    err = abs(res.trace - p / q)
    report.add("|tr(P)/q - p/q| <= 1e-06", err <= 1e-6, err)
    params["trace"] = res.trace
    return report, dict(matrix_to_json(res.matrix), trace=res.trace, p=p, q=q, eps=args.eps)


def _task_winding(args, p, q, params):
    s = _loop_power(args.loop)
    grid = args.grid or 2048
    tol = args.tol if args.tol is not None else 2e-3 * max(1, abs(s))
    rep = clock_shift(p, q)
    rparams = RieffelParams.default(p / q, args.eps)
    expected = s * p / q
    res = winding(x_loop(rep, grid, s, params=rparams))
    err = abs(res.value - expected)
    report = Report(f"winding of X^{s} at {p}/{q}")
    report.add(f"|winding - s p/q| <= {tol:g}", err <= tol, err)
    report.add("max step ||g^-1 g' - 1|| < 1", res.residual < 1.0, res.residual)
    params.update(s=s, grid=grid, value=res.value, expected=expected, max_condition=res.max_condition)
    artifact = {"value": res.value, "expected": expected, "grid": grid, "residual": res.residual,
                "max_condition": res.max_condition, "p": p, "q": q, "s": s}
    if args.check_drift:
        fine = winding(x_loop(rep, 2 * grid, s, params=rparams))
        drift = abs(fine.value - res.value)
        report.add("grid-doubling drift <= 1e-04", drift <= 1e-4, drift)
        artifact["value_doubled"] = fine.value
    return report, artifact


def _task_clutch(args, p, q, params):
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    tol = args.tol if args.tol is not None else 1e-6
    rep = clock_shift(p, q)
    d = make_x_datum(rep, args.n, args.s, RieffelParams.default(p / q, args.eps))
    P = build_idempotent(d, rep, args.cone_grid, args.equator_grid)
    report = idempotent_report(P, tol=tol)
    rank, index = recover_invariants(P, d, args.theta_kind)
    want = (args.n, 0 if args.theta_kind == "rational" and args.n == 1 else args.s)
    report.add(f"recovered invariants {(rank, index)} = {want}", (rank, index) == want)
    params.update(n=args.n, s=args.s, cone_grid=args.cone_grid, equator_grid=args.equator_grid,
                  theta_kind=args.theta_kind, invariants=[rank, index])
    return report, dict(P.meta, invariants=[rank, index], cone_grid=P.cone_grid.tolist(), grid=P.grid.tolist())


def _task_spectrum(args, p, q, params):
    grid = args.grid or 64
    tol = args.tol if args.tol is not None else 0.1
    res = spectrum_c(clock_shift(p, q), grid, RieffelParams.default(p / q, args.eps), coverage_tol=tol)
    params.update(grid=grid, coverage_gap=res.coverage_gap)
    return res.report, {"re": res.points.real.tolist(), "im": res.points.imag.tolist(), "grid": grid}


def _task_chern(args, params):
    grid = args.grid or 1024
    value = classical_chern(args.s, grid)
    report = Report(f"classical winding of z^{args.s}")
    report.add(f"winding = {args.s}", value == args.s, abs(value - args.s))
    params.update(s=args.s, grid=grid, winding=value, chern_number=-value)
    return report, {"s": args.s, "grid": grid, "winding": value, "chern_number": -value}


def cmd_numeric(args) -> int:
    start = time.perf_counter()
    params: dict = {"task": args.task}
    if args.task == "chern":
        report, artifact = _task_chern(args, params)
    else:
        theta, p, q = _theta(args)
        params.update(theta=str(theta), convergent=[p, q], eps=args.eps)
        task = {"rieffel": _task_rieffel, "winding": _task_winding, "clutch": _task_clutch,
                "spectrum-c": _task_spectrum}[args.task]
        report, artifact = task(args, p, q, params)
    _write_json(args.artifact, artifact)
    return _emit(report, "numeric", params, start, args.out)


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "nf":
            return cmd_nf(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_numeric(args)
    except (UsageError, ValueError) as exc:
        if isinstance(exc, (BranchError, SingularFiberError, ClutchingError, AmbiguousInvariant)):
            print(f"check failed: {exc}", file=sys.stderr)
            return EXIT_FAIL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
