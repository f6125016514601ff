"""Command line: trace extremals, run the acceptance checks, sweep grids, convert charts.

Exit codes: 0 success, 1 input or validation error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, charts, checks
from .errors import DomainError, GodelError
from .extremals import CLASSES, ISOTROPIC, TIMELIKE, GeodesicParams, closed_form_array, params_from_initial
from .io import FORMATS, CurveData, RunManifest, load_grid_spec, read_curve, render_csv, render_json, write_curve
from .oracle import IntegratorConfig, oracle_positions

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


class InputError(GodelError):
    """Malformed command-line input."""


def _psi(text: str) -> list:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--psi needs four comma-separated reals: {exc}")
    if len(values) != 4:
        raise argparse.ArgumentTypeError(f"--psi needs four comma-separated reals, got {len(values)}")
    return values


def infer_class(psi) -> str:
    """Causal class from (u, u) = psi0^2 - psi1^2 - psi2^2 - psi3^2 (1 timelike, 0 isotropic)."""
    norm = psi[0] ** 2 - psi[1] ** 2 - psi[2] ** 2 - psi[3] ** 2
    return TIMELIKE if abs(norm - 1.0) < abs(norm) else ISOTROPIC


def params_from_args(args) -> GeodesicParams:
    if args.psi is not None:
        kind = args.kind or infer_class(args.psi)
        return params_from_initial(kind, args.psi)
    kind = args.kind or ISOTROPIC
    phi0 = args.phi0 if args.phi0 is not None else 1.0
    return GeodesicParams.make(kind, phi0, args.phi3, args.t0)


def _flag(exc) -> str:
    # keep flags free of the CSV delimiter
    return "outside: " + str(exc).replace(",", ";")


def to_chart(chart: str, cartesian) -> tuple:
    """Chart coordinates of Cartesian rows, with a per-row domain flag."""
    coords = np.full((len(cartesian), 4), np.nan)
    flags = []
    for i, (x0, x1, x2, x3) in enumerate(cartesian):
        try:
            if chart == charts.CARTESIAN:
                coords[i] = (x0, x1, x2, x3)
            elif chart == charts.CYLINDRICAL:
                r, phi, t = charts.cartesian_to_cylindrical(x0, x1, x2)
                coords[i] = (t, r, phi, x3)
            elif chart == charts.KUNDT:
                coords[i] = charts.cartesian_to_kundt(x0, x1, x2, x3)
            else:
                raise InputError(f"unknown chart {chart!r}")
            flags.append("ok")
        except DomainError as exc:
            flags.append(_flag(exc))
    return coords, flags


def from_chart(chart: str, rows) -> tuple:
    """Cartesian coordinates of chart rows, with a per-row domain flag."""
    out = np.full((len(rows), 4), np.nan)
    flags = []
    for i, (c0, c1, c2, c3) in enumerate(rows):
        try:
            if not all(math.isfinite(v) for v in (c0, c1, c2, c3)):
                raise DomainError("non-finite input coordinates")
            if chart == charts.CARTESIAN:
                out[i] = (c0, c1, c2, c3)
            elif chart == charts.CYLINDRICAL:
                out[i, :3] = charts.cylindrical_to_cartesian(c1, c2, c0)
                out[i, 3] = c3
            else:
                out[i] = charts.kundt_to_cartesian(c0, c1, c2, c3)
            flags.append("ok")
        except DomainError as exc:
            flags.append(_flag(exc))
    return out, flags


def _emit(curve: CurveData, output: str, fmt: str, manifest: RunManifest):
    if output == "-":
        sys.stdout.write(render_csv(curve) if fmt == "csv" else render_json(curve, manifest))
        return []
    return write_curve(curve, output, fmt, manifest)


def cmd_trace(args) -> int:
    params = params_from_args(args)
    if not args.steps >= 1:
        raise InputError("--steps must be at least 1")
    if not args.t_max > args.t_min:
        raise InputError("--t-max must exceed --t-min")
    times = np.linspace(args.t_min, args.t_max, args.steps + 1)
    cart = closed_form_array(params, times)
    coords, flags = to_chart(args.chart, cart)
    config = {
        "params": params.to_record(),
        "t_min": args.t_min,
        "t_max": args.t_max,
        "steps": args.steps,
        "chart": args.chart,
        "format": args.format,
    }
    status = EXIT_OK
    deviation = None
    if args.oracle:
        cfg = IntegratorConfig(method=args.method, h=args.h)
        numeric = oracle_positions([params], times, cfg)[0]
        deviation = float(np.max(np.abs(numeric - cart)))
        config.update({"oracle": {"method": cfg.method, "h": cfg.h, "tol": args.tol, "max_deviation": deviation}})
        print(f"max |closed form - oracle| = {deviation:.3e} (tol {args.tol:.1e})", file=sys.stderr)
        if not deviation <= args.tol:
            status = EXIT_VERIFY
    manifest = RunManifest("trace", config)
    bad = [f for f in flags if f != "ok"]
    curve = CurveData(args.chart, times, coords, flags if bad else None, params.to_record())
    _emit(curve, args.output, args.format, manifest)
    if args.oracle and args.output != "-":
        path = Path(args.output)
        ocoords, oflags = to_chart(args.chart, numeric)
        ocurve = CurveData(args.chart, times, ocoords, oflags if any(f != "ok" for f in oflags) else None, params.to_record())
        write_curve(ocurve, path.with_name(path.stem + ".oracle" + path.suffix), args.format, manifest)
    return status


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or []:
        key, _, value = item.rpartition("=")
        try:
            out[key or "*"] = float(value)
        except ValueError:
            raise InputError(f"bad --tol value {item!r}; use a number or name=number")
    return out


def _item_record(item) -> dict:
    rec = dict(item.__dict__)
    for key in ("measured", "limit"):
        if not math.isfinite(rec[key]):
            rec[key] = None
    return rec


def cmd_verify(args) -> int:
    overrides = _parse_overrides(args.tol)
    try:
        tol = checks.resolve_tolerances(overrides)
    except KeyError as exc:
        raise InputError(str(exc.args[0]))
    results = [check(tol) for check in checks.CHECKS]
    for r in results:
        print(r.table())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    if args.output:
        record = {
            "manifest": RunManifest("verify", {"tolerances": tol}).to_record(),
            "criteria": [
                {"number": r.number, "title": r.title, "passed": r.passed, "items": [_item_record(i) for i in r.items], "notes": r.notes}
                for r in results
            ],
        }
        Path(args.output).write_text(json.dumps(record, indent=1) + "\n")
    return EXIT_OK if not failed else EXIT_VERIFY


def _axis(spec, name):
    """A list of values, a scalar, or {"start", "stop", "count", "endpoint"=true}."""
    if spec is None:
        return None
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, list):
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        try:
            count = int(spec["count"])
            start, stop = float(spec["start"]), float(spec["stop"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"range for {name!r} needs start, stop, count: {exc}")
        if count < 0:
            raise InputError(f"count for {name!r} must be non-negative")
        return [float(v) for v in np.linspace(start, stop, count, endpoint=bool(spec.get("endpoint", True)))]
    raise InputError(f"cannot read axis {name!r}")


def expand_grid(spec: dict) -> tuple:
    """Expand a grid spec into params, in class/phi0/phi3/t0 order.

    Schema: {"class": name or list, "phi0": axis, "phi3": axis, "t0": axis}
    where each axis is a number, a list, or {"start", "stop", "count",
    "endpoint"}.  Angles are radians.  Isotropic extremals always use
    phi0 = 1.  Combinations outside the admissible phi3 range are skipped
    and reported.
    """
    if not isinstance(spec, dict):
        raise InputError("grid spec must be a JSON object")
    unknown = set(spec) - {"class", "phi0", "phi3", "t0", "seed"}
    if unknown:
        raise InputError(f"unknown grid keys: {sorted(unknown)}")
    kinds = spec.get("class", list(CLASSES))
    kinds = [kinds] if isinstance(kinds, str) else list(kinds)
    for k in kinds:
        if k not in CLASSES:
            raise InputError(f"unknown class {k!r}")
    phi0s = _axis(spec.get("phi0"), "phi0") or [1.0]
    phi3s = _axis(spec.get("phi3", 0.0), "phi3")
    t0s = _axis(spec.get("t0", 0.0), "t0")
    grid, skipped = [], []
    for kind in kinds:
        for phi0 in [1.0] if kind == ISOTROPIC else phi0s:
            for phi3 in phi3s:
                for t0 in t0s:
                    try:
                        grid.append(GeodesicParams.make(kind, phi0, phi3, t0))
                    except GodelError as exc:
                        skipped.append({"class": kind, "phi0": phi0, "phi3": phi3, "t0": t0, "reason": str(exc)})
    return grid, skipped


def cmd_sweep(args) -> int:
    spec = load_grid_spec(args.grid)
    grid, skipped = expand_grid(spec)
    if not grid:
        raise InputError("grid spec expands to no valid extremals")
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("sweep", {"grid": spec}, seed=spec.get("seed"))
    audits = analysis.no_closed_geodesic_audit(grid)
    for i, (params, audit) in enumerate(zip(grid, audits)):
        bounds = analysis.bounding_scan([params])
        rec = {"index": i, "params": params.to_record(), "audit": audit.to_record(), "bounds": bounds.to_record()}
        (out / f"point_{i:04d}.json").write_text(json.dumps(rec, indent=1) + "\n")
    aggregate = analysis.bounding_scan(grid)
    closed = [i for i, a in enumerate(audits) if a.verdict != analysis.NO_CLOSURE]
    summary = {
        "manifest": manifest.to_record(),
        "points": len(grid),
        "skipped": skipped,
        "bounds": aggregate.to_record(),
        "closure_candidates": closed,
        "x2_sup_minus_claimed": aggregate.x2_sup - analysis.CLAIMED_X2_BOUND,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    print(
        f"{len(grid)} points ({len(skipped)} skipped); sup|x2| = {aggregate.x2_sup:.12g} "
        f"(claimed 2+sqrt2 = {analysis.CLAIMED_X2_BOUND:.12g}); x1 in [{aggregate.x1_min:.12g}, {aggregate.x1_max:.12g}]; "
        f"F violations {len(aggregate.f_violations)}, D violations {len(aggregate.d_violations)}"
    )
    return EXIT_OK if aggregate.hard_ok and not closed else EXIT_VERIFY


def cmd_convert(args) -> int:
    curve = read_curve(args.input)
    cart, in_flags = from_chart(curve.chart, curve.coords)
    coords, out_flags = to_chart(args.chart, np.nan_to_num(cart, nan=0.0))
    flags = [a if a != "ok" else b for a, b in zip(in_flags, out_flags)]
    coords[[f != "ok" for f in flags]] = np.nan
    n_bad = sum(f != "ok" for f in flags)
    if n_bad:
        print(f"warning: {n_bad} of {len(flags)} rows outside the chart domain", file=sys.stderr)
    manifest = RunManifest("convert", {"input": str(args.input), "from": curve.chart, "to": args.chart})
    result = CurveData(args.chart, curve.times, coords, flags, curve.params)
    _emit(result, args.output, args.format, manifest)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="godel", description="Geodesics of the Gödel universe as a Lie group")
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trace", help="sample a timelike or isotropic geodesic")
    tr.add_argument("--class", dest="kind", choices=CLASSES, help="causal class (inferred from --psi if omitted)")
    tr.add_argument("--phi0", type=float, help="psi0, constant along the extremal (default 1)")
    tr.add_argument("--phi3", type=float, default=0.0, help="x3 velocity")
    tr.add_argument("--t0", type=float, default=0.0, help="phase shift (radians of time)")
    tr.add_argument("--psi", type=_psi, help="initial covector psi0,psi1,psi2,psi3 instead of params")
    tr.add_argument("--t-min", type=float, default=0.0)
    tr.add_argument("--t-max", type=float, default=2.0 * math.pi)
    tr.add_argument("--steps", type=int, default=100)
    tr.add_argument("--chart", choices=charts.CHARTS, default=charts.CARTESIAN)
    tr.add_argument("--format", choices=FORMATS, default="csv")
    tr.add_argument("--output", default="-", help="output path, '-' for stdout")
    tr.add_argument("--oracle", action="store_true", help="also integrate numerically and compare")
    tr.add_argument("--tol", type=float, default=1e-7, help="oracle deviation tolerance")
    tr.add_argument("--method", choices=("rk4-fixed", "rk45-adaptive"), default="rk4-fixed")
    tr.add_argument("--h", type=float, default=1e-3, help="oracle step size")
    tr.set_defaults(func=cmd_trace)

    ve = sub.add_parser("verify", help="run every acceptance check")
    ve.add_argument("--tol", action="append", help="tolerance override: NUMBER for all, or NAME=NUMBER (repeatable)")
    ve.add_argument("--output", help="also write a JSON record of the results")
    ve.set_defaults(func=cmd_verify)

    sw = sub.add_parser("sweep", help="audit and bound-scan a grid of extremals")
    sw.add_argument("--grid", required=True, help="JSON grid spec")
    sw.add_argument("--output", required=True, help="output directory")
    sw.set_defaults(func=cmd_sweep)

    co = sub.add_parser("convert", help="convert a curve file to another chart")
    co.add_argument("input", help="curve file (CSV or JSON)")
    co.add_argument("--chart", choices=charts.CHARTS, required=True, help="target chart")
    co.add_argument("--format", choices=FORMATS, default="csv")
    co.add_argument("--output", default="-")
    co.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (GodelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
