"""Command-line interface: ``supermag <command> [options]``.

Exit codes: 0 success, 1 a mathematical identity or drift budget failed,
2 bad input, 3 filesystem error.
"""
from __future__ import annotations

import argparse
import io
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

from .dynamics import (
    TrajectorySpec,
    conservation_drift,
    five_integrals,
    generate,
    independence_rank,
    random_rational_point,
)
from .exactfield import format_rational, parse_rational
from .model import (
    InvariantViolation,
    ParameterError,
    SystemParams,
    attempt_reduce_X5,
    build_integrals,
    derive_params,
)
from .phasepoly import momentum_grade, momentum_part
from .svgplot import trajectory_svg
from .verify import run_checks

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3

GLOBAL_DEFAULTS = {"omega1": "1", "omega2": "3/2", "m": 3, "n": 2, "json": False, "seed": 0, "output": None}


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda key: argparse.SUPPRESS) if suppress else GLOBAL_DEFAULTS.get
    parser.add_argument("--omega1", default=d("omega1"), help="field component along x, as num/den (default 1)")
    parser.add_argument("--omega2", default=d("omega2"), help="field component along y, as num/den (default 3/2)")
    parser.add_argument("-m", type=int, default=d("m"), help="frequency ratio numerator (default 3)")
    parser.add_argument("-n", type=int, default=d("n"), help="frequency ratio denominator (default 2)")
    parser.add_argument("--json", action="store_true", default=d("json"), help="machine-readable output")
    parser.add_argument("--seed", type=int, default=d("seed"), help="seed for random rational points")
    parser.add_argument("--output", "-o", default=d("output"), help="write the primary output to this path")


def _add_trajectory_args(p: argparse.ArgumentParser, method_default: str) -> None:
    p.add_argument("--initial", default="1,0,0,0,1,1/2", help="x,y,z,p1,p2,p3 as rationals")
    span = p.add_mutually_exclusive_group()
    span.add_argument("--t-end", type=float, help="final time")
    span.add_argument("--periods", type=float, help="final time in units of the period (default 1)")
    p.add_argument("--dt", type=float, help="step / sampling interval (default period/2000, rk4 period/20000)")
    p.add_argument("--method", choices=("closed_form", "rk4"), default=method_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supermag",
        description="Integrals of motion for a charged particle in a constant magnetic field "
        "plus a resonant quadratic potential.",
    )
    _add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub.add_parser("params", parents=[common], help="derived parameters (S, kappa, omega, period)")
    sub.add_parser("integrals", parents=[common], help="serialize every integral of motion")
    sub.add_parser("verify", parents=[common], help="run the exact identity suite")
    sub.add_parser("reduce", parents=[common], help="order-reduction report for X4")

    p = sub.add_parser("independence", parents=[common], help="exact Jacobian ranks at random points")
    p.add_argument("--points", type=int, default=1, help="number of random rational points")

    p = sub.add_parser("simulate", parents=[common], help="trajectory CSV plus drift report")
    _add_trajectory_args(p, "closed_form")
    p.add_argument("--drift-output", help="write the drift report JSON here")
    p.add_argument("--plot", help="also write an SVG projection to this path")
    p.add_argument("--enforce-drift", action="store_true", help="exit 1 if drift exceeds the budget")
    p.add_argument("--drift-budget", type=float, default=1e-8)

    p = sub.add_parser("drift", parents=[common], help="conservation drift of the stored integrals")
    _add_trajectory_args(p, "rk4")
    p.add_argument("--enforce-drift", action="store_true")
    p.add_argument("--drift-budget", type=float, default=1e-8)

    p = sub.add_parser("plot", parents=[common], help="SVG x-y / x-z projection of a trajectory")
    _add_trajectory_args(p, "closed_form")
    p.add_argument("--overlay-omega2", action="append", default=[], help="extra dashed curve with this omega2")
    return parser


def _params(args) -> SystemParams:
    try:
        return derive_params(parse_rational(args.omega1), parse_rational(args.omega2), args.m, args.n)
    except ZeroDivisionError as exc:
        raise InputError(str(exc)) from exc


def _initial(text: str) -> tuple[Fraction, ...]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 6:
        raise InputError(f"--initial needs 6 comma-separated values, got {len(parts)}")
    return tuple(parse_rational(s) for s in parts)


def _spec(args, params: SystemParams) -> TrajectorySpec:
    T = params.period
    if args.t_end is not None:
        t_end = args.t_end
    else:
        t_end = (args.periods if args.periods is not None else 1.0) * T
    dt = args.dt if args.dt is not None else T / (20000 if args.method == "rk4" else 2000)
    return TrajectorySpec(_initial(args.initial), t_end, dt, args.method)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_params(args) -> int:
    params = _params(args)
    doc = params.to_json()
    if args.json:
        _emit(args, _dump(doc))
        return EXIT_OK
    w2 = params.rho
    lines = [
        f"S            = {params.S}",
        f"kappa        = {params.kappa}",
        f"omega^2      = {w2}",
        f"omega1^2     = {params.m**2 * w2}   (m^2 omega^2)",
        f"omega2^2     = {params.n**2 * w2}   (n^2 omega^2)",
        f"W1 S + W2    = {params.coupling}",
        f"tau          = {params.tau}",
        f"T = 2 pi/omega = 2 pi sqrt({1 / w2}) = {params.period:.15g}",
    ]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_integrals(args) -> int:
    integrals = build_integrals(_params(args))
    if args.json or args.output:
        _emit(args, _dump(integrals.to_json()))
        return EXIT_OK
    lines = []
    for name, poly in integrals.items():
        lines.append(f"{name:<11} momentum degree {momentum_grade(poly)[0]:>2}, {len(poly):>4} terms")
    lines.append("")
    for name in ("X0", "X1", "X2", "X3"):
        lines.append(f"{name} = {integrals[name]}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_checks(_params(args), seed=args.seed)
    ok = all(c.passed for c in checks)
    if args.json:
        _emit(args, _dump({"passed": ok, "checks": [c.to_json() for c in checks]}))
    else:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in checks]
        for c in checks:
            if not c.passed and c.residual is not None:
                lines.append(f"residual for {c.name}: {json.dumps(c.residual.to_json(), sort_keys=True)}")
        lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_reduce(args) -> int:
    params = _params(args)
    integrals = build_integrals(params)
    red = integrals.reduction
    basis = {k: integrals[k] for k in ("X0", "X1", "X2", "X3")}
    status = EXIT_OK
    try:
        x5 = attempt_reduce_X5(integrals.X5, basis, params)
        x5_doc = {"reducible": x5.reducible, "momentum_degree": x5.momentum_degree}
    except InvariantViolation as exc:
        x5_doc = {"reducible": True, "error": str(exc)}
        status = EXIT_FAILED
    deg4, _ = momentum_grade(integrals.X4_reduced)
    top = momentum_part(integrals.X4_reduced, deg4)
    doc = {
        "m": params.m,
        "n": params.n,
        "X4_raw_degree": momentum_grade(integrals.X4_raw)[0],
        "X4_reduced_degree": deg4,
        "subtracted": [t.to_json() for t in red.terms],
        "normalization": red.normalization.to_json(),
        "normalization_monomial": list(red.normalization_monomial),
        "leading_support": [t["exp"] for t in top.to_json()["terms"]],
        "X5": x5_doc,
    }
    if args.json:
        _emit(args, _dump(doc))
        return status
    lines = [
        f"X4_raw momentum degree     {doc['X4_raw_degree']}",
        f"X4_reduced momentum degree {deg4}",
        "subtracted products:",
    ]
    for t in red.terms:
        factor = f"X0^{t.x0_power} X1^{t.k} X2^{t.j}" + (" G" if t.kind == "odd" else "")
        lines.append(f"  {t.coefficient}  *  {factor}")
    lines.append(f"normalization scale {red.normalization}")
    lines.append(f"leading part ({len(top)} terms): {top}")
    lines.append("X5 leading-part reduction: " + ("infeasible" if not x5_doc["reducible"] else "FEASIBLE"))
    _emit(args, "\n".join(lines) + "\n")
    return status


def cmd_independence(args) -> int:
    if args.points < 1:
        raise InputError("--points must be at least 1")
    integrals = build_integrals(_params(args))
    five = five_integrals(integrals)
    sets = {
        "X0,X1,X2,X3,X4_reduced": five,
        "X0,X1,X2,X3,X5": five[:4] + [integrals.X5],
        "X0,X1,X2,X3,H": five[:4] + [integrals.H],
        "X0,X1,X2,H": five[:3] + [integrals.H],
    }
    rng = random.Random(args.seed)
    rows = []
    for _ in range(args.points):
        point = random_rational_point(rng)
        rows.append({
            "point": [format_rational(v) for v in point],
            "ranks": {name: independence_rank(polys, point) for name, polys in sets.items()},
        })
    ok = all(r["ranks"]["X0,X1,X2,X3,X4_reduced"] == 5 for r in rows)
    if args.json:
        _emit(args, _dump({"seed": args.seed, "independent": ok, "points": rows}))
    else:
        lines = []
        for r in rows:
            lines.append("point (" + ", ".join(r["point"]) + ")")
            lines.extend(f"  rank d({name}) = {rank}" for name, rank in r["ranks"].items())
        lines.append("five integrals independent" if ok else "five integrals DEPENDENT at some point")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAILED


def _drift_lines(report) -> list[str]:
    lines = [f"method {report.method}, {report.samples} samples, period {report.period:.15g}"]
    for name, rec in report.records.items():
        lines.append(f"  {name:<11} initial {rec.initial:+.12e}  relative drift {rec.relative_drift:.3e}")
    lines.append(f"closure error at one period {report.closure_error:.3e}")
    return lines


def cmd_simulate(args) -> int:
    params = _params(args)
    spec = _spec(args, params)
    integrals = build_integrals(params)
    traj = generate(params, integrals, spec)
    buf = io.StringIO()
    traj.to_csv(buf)
    _emit(args, buf.getvalue())
    report = conservation_drift(params, integrals, spec)
    drift_doc = _dump(report.to_json())
    if args.drift_output:
        with open(args.drift_output, "w") as fh:
            fh.write(drift_doc)
    elif args.output:
        sys.stdout.write(drift_doc if args.json else "\n".join(_drift_lines(report)) + "\n")
    if args.plot:
        with open(args.plot, "w") as fh:
            fh.write(trajectory_svg(traj.states, _title(params)))
    if args.enforce_drift and not report.within(args.drift_budget):
        sys.stderr.write(
            f"drift {report.max_relative_drift:.3e} exceeds budget {args.drift_budget:.3e}\n"
        )
        return EXIT_FAILED
    return EXIT_OK


def cmd_drift(args) -> int:
    params = _params(args)
    report = conservation_drift(params, build_integrals(params), _spec(args, params))
    _emit(args, _dump(report.to_json()) if args.json else "\n".join(_drift_lines(report)) + "\n")
    if args.enforce_drift and not report.within(args.drift_budget):
        sys.stderr.write(
            f"drift {report.max_relative_drift:.3e} exceeds budget {args.drift_budget:.3e}\n"
        )
        return EXIT_FAILED
    return EXIT_OK


def _title(params: SystemParams) -> str:
    return (f"m={params.m} n={params.n} W1={format_rational(params.omega1_field)} "
            f"W2={format_rational(params.omega2_field)}")


def cmd_plot(args) -> int:
    params = _params(args)
    spec = _spec(args, params)
    main = generate(params, None, spec)
    overlays = []
    for w2 in args.overlay_omega2:
        other = derive_params(params.omega1_field, parse_rational(w2), params.m, params.n)
        # keep the time span in periods of the overlay's own system
        t_end = spec.t_end / params.period * other.period
        ospec = TrajectorySpec(spec.initial, t_end, spec.dt * other.period / params.period, spec.method)
        overlays.append(generate(other, None, ospec).states)
    _emit(args, trajectory_svg(main.states, _title(params), overlays))
    return EXIT_OK


COMMANDS = {
    "params": cmd_params,
    "integrals": cmd_integrals,
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "independence": cmd_independence,
    "simulate": cmd_simulate,
    "drift": cmd_drift,
    "plot": cmd_plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (InputError, ParameterError, ValueError, TypeError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except FloatingPointError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
