"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 mathematical precondition failure,
4 numerical failure.  Reports are deterministic JSON on stdout; trajectory
files are flat whitespace-separated rows with '#' header lines, written
atomically.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import __version__
from .annihilator import CovectorPoint, integrate_characteristic
from .distribution import (Distribution, bracket_generating_step,
                           growth_vector_at, lie_flag)
from .documents import (load_curve, load_distribution, load_jet, load_strata,
                        dump_jet, parse_document)
from .endpoint import ClassifyOptions, classify_curve, endpoint, lift_curve
from .errors import HliftError, InputError, NumericalError, PreconditionError
from .jets import (CurveJet, ehresmann_jet_lift, inadmissible_codim_bound,
                   is_characteristic_jet, is_horizontal_jet)
from .kernel import backend_name
from .models import BUNDLED, bundled_document
from .poly import as_fraction, poly_parse
from .report import Report
from .strata import FunctionMatrix, GridAxis, partition_grid

EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4


# ---------------------------------------------------------------------------
# Argument helpers


def _load_model(name_or_path: str):
    """Bundled model name, or a path to a model document."""
    if name_or_path in BUNDLED:
        doc = bundled_document(name_or_path)
    else:
        path = Path(name_or_path)
        if not path.exists():
            raise InputError(
                f"unknown model {name_or_path!r}: not bundled "
                f"({sorted(BUNDLED)}) and no such file")
        doc = parse_document(path.read_text(), f"model file {name_or_path}")
    dist = load_distribution(doc)
    return dist, load_strata(doc, dist), doc


def _parse_point(text: str, expect: int) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != expect:
        raise InputError(f"point {text!r} has {len(parts)} entries, "
                         f"expected {expect}")
    return tuple(as_fraction(p) for p in parts)


def _parse_covector(text: str, dist: Distribution) -> CovectorPoint:
    if ";" not in text:
        raise InputError("covector must be written base;fiber, e.g. 0,0,0;1")
    base_text, fiber_text = text.split(";", 1)
    return CovectorPoint(_parse_point(base_text, dist.dim),
                         _parse_point(fiber_text, dist.corank))


def _parse_orders(text: str) -> tuple:
    if ".." not in text:
        raise InputError("orders must be written r1..r2, e.g. 2..12")
    lo_text, hi_text = text.split("..", 1)
    try:
        lo, hi = int(lo_text), int(hi_text)
    except ValueError as exc:
        raise InputError(f"bad order range {text!r}") from exc
    if lo < 1 or lo > hi:
        raise InputError(f"order range {text!r} is empty or starts below 1")
    return lo, hi


def _parse_grid(text: str, vars) -> list:
    """Grid syntax: var=value or var=lo:hi:count, comma-separated between
    variables, e.g. "x2=-1:1:5,x1=0,y=0"."""
    axes = []
    if not text.strip():
        raise InputError("empty grid specification")
    for chunk in text.split(","):
        if "=" not in chunk:
            raise InputError(f"bad grid axis {chunk!r}")
        name, spec = chunk.split("=", 1)
        name = name.strip()
        if name not in vars:
            raise InputError(f"grid variable {name!r} not among {vars}")
        parts = spec.split(":")
        if len(parts) == 1:
            axes.append(GridAxis.fixed(name, as_fraction(parts[0])))
        elif len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise InputError(f"grid axis {name!r} has empty count")
            axes.append(GridAxis.range(name, as_fraction(parts[0]),
                                       as_fraction(parts[1]), count))
        else:
            raise InputError(f"bad grid axis {chunk!r}; use var=v or var=lo:hi:n")
    return axes


def _read_document(path: str, context: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise InputError(f"{context}: no such file {path!r}")
    return parse_document(p.read_text(), context)


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".",
                               prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_mode(args, allowed: str) -> str:
    requested = getattr(args, "mode", None) or allowed
    if requested != allowed:
        raise InputError(
            f"this command is {allowed}-only; --{requested} is not available")
    return allowed


def _emit(report: Report) -> None:
    sys.stdout.write(report.to_json() + "\n")


# ---------------------------------------------------------------------------
# Commands


def cmd_dist_info(args) -> int:
    mode = _check_mode(args, "exact")
    dist, _, _ = _load_model(args.model)
    point = _parse_point(args.point, dist.dim)
    max_step = args.max_step or dist.dim
    flag = lie_flag(dist, max_step)
    gv = growth_vector_at(dist, point, flag=flag)
    samples = [point]
    for i in range(dist.dim):
        for delta in (Fraction(1), Fraction(-1), Fraction(1, 2)):
            q = list(point)
            q[i] += delta
            samples.append(tuple(q))
    step_report = bracket_generating_step(dist, samples, max_step)
    step_at_point = step_report.steps[0]
    results = {
        "dim": dist.dim,
        "rank": dist.rank,
        "coords": list(dist.coords),
        "point": list(point),
        "growth_vector": list(gv),
        "step_at_point": step_at_point,
        "steps_over_samples": {
            "min": step_report.min_step,
            "max": step_report.max_step,
            "uniform": step_report.uniform,
            "generated_everywhere": step_report.generated_everywhere,
        },
        "regular_over_samples": step_report.uniform,
        "verdict": step_report.verdict,
        "flag_generator_counts": [len(flag.generators(n))
                                  for n in range(1, flag.depth + 1)],
        "flag_generators": [[[str(c) for c in g.components]
                             for g in flag.generators(n)]
                            for n in range(1, flag.depth + 1)],
    }
    _emit(Report("dist info", {"model": args.model, "point": args.point,
                               "max_step": max_step}, results, mode))
    return 0


def _trajectory_text(header: dict, columns: list, rows) -> str:
    lines = [f"# hlift {__version__} trajectory"]
    for key in sorted(header):
        lines.append(f"# {key}: {header[key]}")
    lines.append("# columns: " + " ".join(columns))
    for row in rows:
        lines.append(" ".join(f"{v:.12e}" if isinstance(v, float) else str(v)
                              for v in row))
    return "\n".join(lines) + "\n"


def cmd_lift(args) -> int:
    mode = _check_mode(args, "float")
    dist, _, _ = _load_model(args.model)
    doc = _read_document(args.curve, "curve file")
    control, basepoint = load_curve(doc, dist)
    path = lift_curve(dist, control, basepoint, h=args.step)
    out = args.out or f"{dist.name}-lift.traj"
    rows = []
    for k, t in enumerate(path.times):
        res = float(path.residuals[k - 1].max()) if k and path.residuals.size else 0.0
        rows.append([float(t)] + [float(v) for v in path.states[k]] + [res])
    _atomic_write(out, _trajectory_text(
        {"model": dist.name, "command": "lift", "h": args.step},
        ["t"] + list(dist.coords) + ["residual"], rows))
    results = {
        "endpoint": list(endpoint(path)),
        "reduced_endpoint": list(endpoint(path))[dist.rank:],
        "max_residual": path.max_residual,
        "steps": len(path.times) - 1,
        "trajectory_file": out,
        "backend": backend_name(),
    }
    _emit(Report("lift", {"model": args.model, "curve": doc, "step": args.step},
                 results, mode))
    return 0


def cmd_classify(args) -> int:
    mode = _check_mode(args, "float")
    dist, _, _ = _load_model(args.model)
    doc = _read_document(args.curve, "curve file")
    control, basepoint = load_curve(doc, dist)
    opts = ClassifyOptions(directions=args.directions, tol=args.tol,
                           h_fd=args.h_fd, step=args.step)
    report = classify_curve(dist, control, basepoint, opts)
    results = {
        "verdict": report.verdict,
        "singular_values": list(report.singular_values),
        "directions_used": report.directions_used,
        "tolerances": report.tol_used,
        "jacobian": [list(row) for row in report.jacobian],
        "backend": backend_name(),
    }
    _emit(Report("classify", {"model": args.model, "curve": doc,
                              "tol": args.tol, "directions": args.directions},
                 results, mode))
    return 0


def cmd_abnormal(args) -> int:
    mode = _check_mode(args, "float")
    dist, strata, _ = _load_model(args.model)
    if args.stratum not in strata:
        raise InputError(f"model {dist.name!r} declares no stratum "
                         f"{args.stratum!r}; available: {sorted(strata)}")
    stratum = strata[args.stratum]
    cp = _parse_covector(args.covector, dist)
    traj = integrate_characteristic(dist, cp, stratum, T=args.time,
                                    h=args.step)
    out = args.out or f"{dist.name}-abnormal.traj"
    fiber_names = [f"a{i + 1}" for i in range(dist.corank)]
    rows = []
    for k, t in enumerate(traj.times):
        rows.append([float(t)] + [float(v) for v in traj.points[k]]
                    + [traj.kernel_ranks[k], float(traj.residuals[k])])
    _atomic_write(out, _trajectory_text(
        {"model": dist.name, "command": "abnormal", "cp0": args.covector,
         "T": args.time, "h": args.step, "stratum": stratum.name},
        ["t"] + list(dist.coords) + fiber_names + ["kernel_rank", "residual"],
        rows))
    results = {
        "completed": traj.completed,
        "warning": traj.warning,
        "eta_invariance": "assumed (declared stratum; not verified symbolically)",
        "steps": len(traj.times) - 1,
        "final_point": [float(v) for v in traj.points[-1]],
        "projected_endpoint": [float(v) for v in traj.base_points[-1]],
        "max_residual": float(traj.residuals.max()),
        "trajectory_file": out,
    }
    _emit(Report("abnormal", {"model": args.model, "covector": args.covector,
                              "stratum": args.stratum, "T": args.time,
                              "h": args.step}, results, mode))
    return 0 if traj.completed else EXIT_NUMERICAL


def cmd_jet(args) -> int:
    mode = _check_mode(args, "exact")
    dist, _, _ = _load_model(args.model)
    if args.jet_command == "lift":
        if args.controls is None:
            raise InputError("jet lift needs --controls \"p1,p2,...\"")
        order = args.order
        if order is None or order < 1:
            raise InputError("jet lift needs --order >= 1")
        polys = [poly_parse(s.strip(), ("t",)) for s in args.controls.split(",")]
        if len(polys) != dist.rank:
            raise InputError(f"{len(polys)} control polynomials for rank "
                             f"{dist.rank}")
        base = tuple(p.terms.get((0,), Fraction(0)) for p in polys)
        taylor = tuple(tuple(p.terms.get((k,), Fraction(0)) for p in polys)
                       for k in range(1, order + 1))
        control_jet = CurveJet("controls", order, base, taylor)
        vertical = (_parse_point(args.vertical_base, dist.corank)
                    if args.vertical_base else (Fraction(0),) * dist.corank)
        lifted = ehresmann_jet_lift(dist, control_jet, vertical)
        check = is_horizontal_jet(dist, lifted)
        results = {"jet": dump_jet(lifted), "horizontal": check.horizontal}
        _emit(Report("jet lift", {"model": args.model, "controls": args.controls,
                                  "order": order,
                                  "vertical_base": args.vertical_base},
                     results, mode))
        return 0
    if args.jet is None:
        raise InputError(f"jet {args.jet_command} needs --jet FILE")
    doc = _read_document(args.jet, "jet file")
    jet = load_jet(doc, dist)
    if args.jet_command == "check":
        check = is_horizontal_jet(dist, jet)
        results = {
            "horizontal": check.horizontal,
            "residual_series": [list(s.coeffs) for s in check.residuals],
        }
        _emit(Report("jet check", {"model": args.model, "jet": doc}, results, mode))
        return 0
    # characteristic
    if jet.ambient != "Z1":
        raise InputError("jet characteristic expects an annihilator (Z1) jet")
    if all(c == 0 for c in jet.base[dist.dim:]):
        raise InputError("jet is based on the zero section")
    check = is_characteristic_jet(dist, jet)
    results = {
        "characteristic": check.characteristic,
        "projection_horizontal": check.projection_horizontal,
        "constant_jet": check.constant,
        "residual_series": [list(s.coeffs) for s in check.residuals],
    }
    _emit(Report("jet characteristic", {"model": args.model, "jet": doc},
                 results, mode))
    return 0


def cmd_audit(args) -> int:
    mode = _check_mode(args, "exact")
    dist, strata, _ = _load_model(args.model)
    lo, hi = _parse_orders(args.orders)
    table = []
    for r in range(lo, hi + 1):
        audit = inadmissible_codim_bound(dist, r, list(strata.values()))
        table.append({
            "r": r,
            "dim_horizontal_jets": audit.dim_horizontal,
            "tangency_dimension_bound": audit.tangency_dimension_bound,
            "codim_lower_bound": audit.codim_lower_bound,
            "bound_informative": audit.bound_informative,
            "strata": [{
                "name": s.stratum, "kind": s.kind,
                "kernel_rank": s.kernel_rank, "dim": s.stratum_dim,
                "family_dim": s.family_dim, "codim": s.codim,
            } for s in audit.strata],
        })
    _emit(Report("audit", {"model": args.model, "orders": args.orders},
                 {"table": table}, mode))
    return 0


def cmd_strata(args) -> int:
    mode = _check_mode(args, "exact")
    dist, _, _ = _load_model(args.model)
    if args.matrix == "custom":
        if not args.matrix_file:
            raise InputError("--matrix custom needs --matrix-file")
        doc = _read_document(args.matrix_file, "matrix file")
        vars = tuple(doc.get("vars", dist.coords))
        entries = [[poly_parse(s, vars) for s in row]
                   for row in doc.get("entries", [])]
        if not entries:
            raise InputError("matrix file has no entries")
        FM = FunctionMatrix(entries)
        axes = _parse_grid(args.grid, FM.vars)
        part = partition_grid(FM, axes)
        level = None
    else:
        flag = lie_flag(dist, args.level or dist.dim)
        axes = _parse_grid(args.grid, dist.coords)
        if args.level:
            level = args.level
            FM = FunctionMatrix.from_fields(flag.generators(level))
            part = partition_grid(FM, axes)
        else:
            # First flag level whose grid-maximal rank reaches dim(M).
            level = 1
            part = partition_grid(
                FunctionMatrix.from_fields(flag.generators(1)), axes)
            for n in range(2, flag.depth + 1):
                if part.dense_rank == dist.dim:
                    break
                FM = FunctionMatrix.from_fields(flag.generators(n))
                part = partition_grid(FM, axes)
                level = n
    results = {
        "flag_level": level,
        "histogram": {str(k): v for k, v in sorted(part.histogram.items())},
        "dense_rank": part.dense_rank,
        "dense_rank_note": "grid-maximal rank (evidence, not proof)",
        "sub_maximal_points": [list(p) for p in part.sub_locus],
        "points_sampled": len(part.points),
    }
    _emit(Report("strata", {"model": args.model, "grid": args.grid,
                            "matrix": args.matrix, "level": args.level},
                 results, mode))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlift",
        description="Horizontal-curve toolkit for bracket-generating "
                    "distributions")
    parser.add_argument("--version", action="version",
                        version=f"hlift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_mode(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--exact", dest="mode", action="store_const",
                           const="exact", help="exact rational mode")
        group.add_argument("--float", dest="mode", action="store_const",
                           const="float", help="floating-point mode")

    dist_p = sub.add_parser("dist", help="distribution analyses")
    dist_sub = dist_p.add_subparsers(dest="dist_command", required=True)
    info = dist_sub.add_parser("info", help="growth vector and step at a point")
    info.add_argument("model")
    info.add_argument("--point", required=True, help="comma-separated rationals")
    info.add_argument("--max-step", type=int, default=None)
    add_mode(info)
    info.set_defaults(func=cmd_dist_info)

    lift_p = sub.add_parser("lift", help="integrate the lifting ODE")
    lift_p.add_argument("model")
    lift_p.add_argument("--curve", required=True, help="curve document (JSON)")
    lift_p.add_argument("--step", type=float, default=1e-3)
    lift_p.add_argument("--out", default=None, help="trajectory output path")
    add_mode(lift_p)
    lift_p.set_defaults(func=cmd_lift)

    cls = sub.add_parser("classify", help="regular/singular classification")
    cls.add_argument("model")
    cls.add_argument("--curve", required=True)
    cls.add_argument("--tol", type=float, default=1e-3)
    cls.add_argument("--directions", type=int, default=None)
    cls.add_argument("--h-fd", type=float, default=1e-5)
    cls.add_argument("--step", type=float, default=1e-3)
    add_mode(cls)
    cls.set_defaults(func=cmd_classify)

    ab = sub.add_parser("abnormal", help="integrate a characteristic curve")
    ab.add_argument("model")
    ab.add_argument("--covector", required=True, help="base;fiber, e.g. 0,0,0;1")
    ab.add_argument("--stratum", required=True)
    ab.add_argument("--time", type=float, default=1.0)
    ab.add_argument("--step", type=float, default=1e-3)
    ab.add_argument("--out", default=None)
    add_mode(ab)
    ab.set_defaults(func=cmd_abnormal)

    jet = sub.add_parser("jet", help="formal jet operations")
    jet_sub = jet.add_subparsers(dest="jet_command", required=True)
    for name, help_text in (("lift", "lift a control jet"),
                            ("check", "horizontality of a jet"),
                            ("characteristic", "characteristic test")):
        jp = jet_sub.add_parser(name, help=help_text)
        jp.add_argument("model")
        jp.add_argument("--jet", default=None, help="jet document (JSON)")
        jp.add_argument("--controls", default=None,
                        help="comma-separated polynomials in t")
        jp.add_argument("--order", type=int, default=None)
        jp.add_argument("--vertical-base", default=None)
        add_mode(jp)
        jp.set_defaults(func=cmd_jet)

    audit = sub.add_parser("audit", help="jet dimension/codimension table")
    audit.add_argument("model")
    audit.add_argument("--orders", required=True, help="range r1..r2")
    add_mode(audit)
    audit.set_defaults(func=cmd_audit)

    strata_p = sub.add_parser("strata", help="rank partition over a grid")
    strata_p.add_argument("model")
    strata_p.add_argument("--matrix", choices=("flag", "custom"), default="flag")
    strata_p.add_argument("--matrix-file", default=None)
    strata_p.add_argument("--grid", required=True,
                          help="e.g. x2=-1:1:5,x1=0,y=0")
    strata_p.add_argument("--level", type=int, default=None)
    add_mode(strata_p)
    strata_p.set_defaults(func=cmd_strata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"hlift: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"hlift: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericalError as exc:
        print(f"hlift: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HliftError as exc:  # pragma: no cover - catch-all
        print(f"hlift: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
