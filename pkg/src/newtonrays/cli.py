"""Command-line interface: one invocation builds one artifact.

Subcommands::

    map           construct a Newton map and dump its data
    trace-ray     internal rays of one immediate basin with certificates
    graph         the level-k ray graph of a Newton map
    cut-angles    the cut-angle scan for a cubic basin pair
    curve-c       the separating-curve angle and curve for a cubic
    converge      a degenerating-family convergence experiment
    escape-check  the critical-orbit escape test for the quartic family
    classify      hyperbolic type of one quartic (period-two slice member)
    render-dyn    basin raster of a Newton map with ray overlays
    render-par    type map of the period-two parameter slice

Polynomials are given either as a comma-separated low-order-first
coefficient list (``--poly 0,1,2`` means 2z²+z) or as a named preset:
``z3m1`` (z³−1), ``fig2-cubic`` (z³/3 − z²/2 + 1), ``per2:c`` (the
period-two slice member at parameter c), ``quartic-escape:R`` (the root
escape family (z³−1)(z−R)).

Every command prints a JSON summary to standard output and writes files
atomically (temp + rename), embedding the resolved configuration for
provenance.  Exit codes: 0 success, 1 invalid input, 2 numerical failure
(the failed hypothesis is named), 3 an indeterminate result under
``--strict``.  Relative output paths resolve against ``$NEWTONRAYS_OUT``
when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import classify as cls
from . import families as fam
from . import graphs as gr
from .bottcher import chart_at_root
from .maps import (
    MapRep,
    critical_points,
    fixed_points,
    map_to_dict,
    newton_of_poly,
    poles,
)
from .rays import TraceOptions, trace_rays
from .sphere import Poly, SpherePoint

OUT_ENV = "NEWTONRAYS_OUT"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_INDETERMINATE = 3


class CliError(Exception):
    """An error with a fixed process exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad flags; invalid input is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(EXIT_INVALID, message)


def _parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"cannot parse complex number {text!r}") from exc


def _parse_angle(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(EXIT_INVALID, f"cannot parse angle {text!r}") from exc


def _parse_angles(text: str) -> List[Fraction]:
    return [_parse_angle(part) for part in text.split(",") if part.strip()]


def _resolve_poly(spec: str) -> Tuple[Poly, dict]:
    """Resolve a preset name or coefficient list to a polynomial."""
    s = spec.strip()
    if s == "z3m1":
        return Poly.from_roots([1, -0.5 + 0.8660254037844386j, -0.5 - 0.8660254037844386j]), {
            "preset": "z3m1"
        }
    if s == "fig2-cubic":
        return Poly(np.array([1.0, 0.0, -0.5, 1.0 / 3.0], np.complex128)), {
            "preset": "fig2-cubic"
        }
    if s.startswith("per2:"):
        c = _parse_complex(s[len("per2:"):])
        spec_f = fam.FamilySpec(fam.PER2_SLICE, c)
        if spec_f.degenerate:
            raise CliError(EXIT_INVALID, f"per2 parameter {c} is degenerate")
        return spec_f.polynomial(), {"preset": "per2", "parameter": _fmt_c(c)}
    if s.startswith("quartic-escape:"):
        r = _parse_complex(s[len("quartic-escape:"):])
        return fam.FamilySpec(fam.QUARTIC_ROOT_ESCAPE, r).polynomial(), {
            "preset": "quartic-escape",
            "parameter": _fmt_c(r),
        }
    try:
        coeffs = [_parse_complex(p) for p in s.split(",")]
    except CliError:
        raise CliError(
            EXIT_INVALID,
            f"unknown polynomial {spec!r}: expected a preset "
            "(z3m1, fig2-cubic, per2:c, quartic-escape:R) or coefficients",
        )
    if len(coeffs) < 2:
        raise CliError(EXIT_INVALID, "a polynomial needs at least two coefficients")
    return Poly(np.array(coeffs, np.complex128)), {"coefficients": s}


def _fmt_c(z: complex) -> str:
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{z.imag:+}j"


def _point_json(p: SpherePoint) -> object:
    if p.is_infinite:
        return "inf"
    return [p.value.real, p.value.imag]


def _out_path(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    base = os.environ.get(OUT_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _atomic_text(path: str, text: str) -> str:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def _write_json(path: str, payload: dict) -> str:
    return _atomic_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _newton(args) -> Tuple[MapRep, dict]:
    poly, meta = _resolve_poly(args.poly)
    try:
        return newton_of_poly(poly), meta
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"cannot build Newton map: {exc}") from exc


def _snap_root(m: MapRep, z: complex, text: str) -> complex:
    """Snap user input to the nearest computed root or reject it."""
    roots = [p.value for p, _ in fixed_points(m) if not p.is_infinite]
    near = min(roots, key=lambda r: abs(r - z))
    if abs(near - z) > 1e-6 * (1.0 + abs(near)):
        raise CliError(EXIT_INVALID, f"{text} is not a root of the polynomial")
    return near


# ---------------------------------------------------------------------------
# subcommands


def _cmd_map(args) -> dict:
    m, meta = _newton(args)
    config = {"command": "map", "poly": meta}
    summary = {
        "config": config,
        "degree": m.degree,
        "roots": [_point_json(p) for p, _ in fixed_points(m) if not p.is_infinite],
        "fixed_points": [
            {"point": _point_json(p), "multiplier": [mu.real, mu.imag]}
            for p, mu in fixed_points(m)
        ],
        "critical_points": [
            {"point": _point_json(p), "order": order} for p, order in critical_points(m)
        ],
        "poles": [
            {"point": _point_json(p), "order": order} for p, order in poles(m)
        ],
    }
    if args.out:
        payload = dict(map_to_dict(m))
        payload["config"] = config
        summary["written"] = [_write_json(_out_path(args.out), payload)]
    return summary


def _cmd_trace_ray(args) -> dict:
    m, meta = _newton(args)
    root = _snap_root(m, _parse_complex(args.root), args.root)
    angles = _parse_angles(args.angles)
    if not angles:
        raise CliError(EXIT_INVALID, "no angles given")
    config = {
        "command": "trace-ray",
        "poly": meta,
        "root": _fmt_c(root),
        "angles": [str(a) for a in angles],
        "order": args.order,
    }
    try:
        chart = chart_at_root(m, root, order=args.order)
    except ValueError as exc:
        raise CliError(EXIT_NUMERICAL, f"chart construction failed: {exc}") from exc
    rays = trace_rays(chart, angles, TraceOptions())
    entries = {}
    for angle, ray in rays.items():
        cert = ray.ensure_certificate()
        entries[str(angle)] = {
            "status": ray.status,
            "approx": _point_json(ray.approx) if ray.approx else None,
            "landing_point": _point_json(ray.landing_point) if ray.landing_point else None,
            "preperiod": cert.preperiod if cert else None,
            "period": cert.period if cert else None,
            "residual": cert.residual if cert else None,
            "note": ray.note,
        }
    summary = {"config": config, "rays": entries}
    if args.out:
        summary["written"] = [_write_json(_out_path(args.out), summary)]
    return summary


def _cmd_graph(args) -> dict:
    m, meta = _newton(args)
    config = {"command": "graph", "poly": meta, "level": args.level}
    try:
        graph = gr.newton_graph(m, args.level)
    except fam.HypothesisError as exc:
        raise CliError(EXIT_NUMERICAL, f"hypothesis failed: {exc.hypothesis}") from exc
    except ValueError as exc:
        raise CliError(EXIT_NUMERICAL, str(exc)) from exc
    payload = graph_summary(graph)
    payload["config"] = config
    if args.out:
        doc = gr.graph_to_dict(graph)
        doc["config"] = config
        payload["written"] = [_write_json(_out_path(args.out), doc)]
    if args.dot:
        payload.setdefault("written", []).append(
            _atomic_text(_out_path(args.dot), gr.graph_to_dot(graph))
        )
    return payload


def graph_summary(graph: gr.RayGraph) -> dict:
    return {
        "rays": len(graph.rays),
        "landed": sum(1 for r in graph.rays if r.landed),
        "vertices": [
            {"point": _point_json(p), "kind": kind} for p, kind in graph.vertices
        ],
        "connected": graph.is_connected(),
    }


def _parse_pair(text: str) -> Tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(EXIT_INVALID, "--pair needs two comma-separated root indices")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"--pair entries must be root indices: {text!r}") from exc


def _auto_pair(m: MapRep) -> Tuple[int, int]:
    """The unique basin pair sharing a pole, as root indices."""
    pairs = gr.shared_pole_pairs(m)
    if len(pairs) != 1:
        raise CliError(
            EXIT_INVALID,
            f"{len(pairs)} basin pairs share a pole; disambiguate with --pair",
        )
    la, lb, _ = pairs[0]
    return int(la[1:]), int(lb[1:])


def _cmd_cut_angles(args) -> dict:
    m, meta = _newton(args)
    config = {
        "command": "cut-angles",
        "poly": meta,
        "q_max": args.qmax,
        "pair": args.pair,
    }
    try:
        pair = _parse_pair(args.pair) if args.pair else _auto_pair(m)
        result = gr.cut_angles(m, pair, args.qmax)
    except CliError:
        raise
    except ValueError as exc:
        raise CliError(EXIT_NUMERICAL, str(exc)) from exc
    config["pair"] = list(pair)
    members = sorted(result.members)
    summary = {
        "config": config,
        "angles": [str(a) for a in members],
        "alpha": str(result.alpha_estimate) if result.alpha_estimate is not None else None,
        "indeterminate": [str(a) for a in sorted(result.indeterminate)],
        "max_residual": max(result.distances.values()) if result.distances else None,
    }
    if args.out:
        summary["written"] = [_write_json(_out_path(args.out), summary)]
    return summary


def _cmd_curve_c(args) -> dict:
    m, meta = _newton(args)
    config = {"command": "curve-c", "poly": meta, "q_max": args.qmax}
    if args.pair:
        orientations = [_parse_pair(args.pair)]
    else:
        a, b = _auto_pair(m)
        orientations = [(a, b), (b, a)]  # condition (i) is orientation-sensitive
    curve = None
    failures = []
    for pair in orientations:
        try:
            theta, k = gr.find_curve_c_angle(m, pair=pair, q_max=args.qmax)
            curve = gr.build_curve_C(m, theta, k, pair=pair)
            config["pair"] = list(pair)
            break
        except ValueError as exc:
            failures.append(f"pair {pair}: {exc}")
    if curve is None:
        raise CliError(EXIT_NUMERICAL, "; ".join(failures))
    inside = {}
    for p, _ in poles(m):
        if not p.is_infinite:
            verdict = gr.winding_contains(curve, p.value)
            inside[_fmt_c(p.value)] = verdict
    summary = {
        "config": config,
        "theta": str(theta),
        "k": k,
        "single_cycle": curve.is_cycle(),
        "poles_inside": inside,
    }
    if args.out:
        doc = gr.graph_to_dict(curve)
        doc["config"] = config
        doc["theta"] = str(theta)
        doc["k"] = k
        summary["written"] = [_write_json(_out_path(args.out), doc)]
    return summary


def _cmd_converge(args) -> dict:
    params = [p.strip() for p in args.R.split(",") if p.strip()]
    if not params:
        raise CliError(EXIT_INVALID, "no parameters given")
    angles = [a.strip() for a in args.angles.split(",") if a.strip()]
    if not angles:
        raise CliError(EXIT_INVALID, "no angles given")
    try:
        limit = fam.family_limit(fam.FamilySpec(args.family, _parse_complex(params[0])))
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    n_basins = len([p for p, _ in fixed_points(limit) if not p.is_infinite])
    # the same angle set is requested in every immediate basin of the limit
    cfg = {
        "family": {"kind": args.family},
        "parameters": params,
        "gamma": [[[r], angles] for r in range(n_basins)],
    }
    config = {"command": "converge", **cfg, "threads": args.threads}
    try:
        report = fam.experiment_from_config(
            {**cfg, "tolerances": {"max_workers": args.threads}}
        )
    except fam.HypothesisError as exc:
        raise CliError(EXIT_NUMERICAL, f"hypothesis failed: {exc.hypothesis}") from exc
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    summary = {
        "config": config,
        "parameters": [_fmt_c(p) for p in report.parameters],
        "d_h": report.d_h_values,
        "iso": [row.iso for row in report.rows],
        "strictly_decreasing": report.strictly_decreasing,
        "final_d_h": report.final_d_h,
        "warnings": list(report.warnings),
    }
    if args.strict and any(row.iso is None for row in report.rows):
        raise CliError(EXIT_INDETERMINATE, "isomorphism indeterminate for some member")
    written = []
    if args.out:
        csv_text = "# config=" + json.dumps(config, sort_keys=True) + "\n"
        csv_text += fam.report_to_csv(report)
        written.append(_atomic_text(_out_path(args.out), csv_text))
    if args.json:
        doc = fam.report_to_json(report)
        doc["config"] = config
        written.append(_write_json(_out_path(args.json), doc))
    if written:
        summary["written"] = written
    return summary


def _cmd_escape_check(args) -> dict:
    if args.family != fam.QUARTIC_ROOT_ESCAPE:
        raise CliError(EXIT_INVALID, "escape-check applies to the quartic-escape family")
    params = [_parse_complex(p) for p in args.R.split(",") if p.strip()]
    if not params:
        raise CliError(EXIT_INVALID, "no parameters given")
    specs = [fam.FamilySpec(fam.QUARTIC_ROOT_ESCAPE, p) for p in params]
    config = {
        "command": "escape-check",
        "family": args.family,
        "R": [_fmt_c(p) for p in params],
        "k": args.k,
        "eps": args.eps,
    }
    try:
        verdicts = fam.critical_escape_check(specs, args.k, args.eps)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    summary = {
        "config": config,
        "verdicts": {_fmt_c(p): bool(v) for p, v in verdicts},
        "all_pass": all(v for _, v in verdicts),
    }
    if args.out:
        summary["written"] = [_write_json(_out_path(args.out), summary)]
    return summary


def _cmd_classify(args) -> dict:
    c = _parse_complex(args.c)
    config = {
        "command": "classify",
        "c": _fmt_c(c),
        "budget": args.budget,
        "resolution": args.res,
    }
    spec = fam.FamilySpec(fam.PER2_SLICE, c)
    if spec.degenerate:
        raise CliError(EXIT_INVALID, f"parameter {args.c} is degenerate (collided roots)")
    m = fam.make_family(spec)
    result = cls.classify_type(m, budget=args.budget, resolution=args.res)
    summary = {"config": config, **result.to_dict()}
    if args.out and result.grid is not None:
        summary["written"] = [
            cls.write_label_grid(_out_path(args.out), result.grid, config)
        ]
    if args.strict and result.label is cls.TypeLabel.UNRESOLVED:
        raise CliError(EXIT_INDETERMINATE, f"classification unresolved: {result.detail}")
    return summary


def _region_from(args) -> Tuple[float, float, float, float]:
    if args.region:
        parts = [float(p) for p in args.region.split(",")]
        if len(parts) != 4:
            raise CliError(EXIT_INVALID, "--region needs x0,x1,y0,y1")
        return tuple(parts)  # type: ignore[return-value]
    center = _parse_complex(args.center)
    w = args.width / 2.0
    return (center.real - w, center.real + w, center.imag - w, center.imag + w)


def _cmd_render_dyn(args) -> dict:
    m, meta = _newton(args)
    region = _region_from(args) if (args.region or args.center != "0+0i" or args.width != 4.0) else None
    config = {
        "command": "render-dyn",
        "poly": meta,
        "region": list(region) if region else "auto",
        "resolution": args.res,
        "budget": args.budget,
        "invert": args.invert,
        "ray_angles": args.rays,
        "ray_root": args.root,
    }
    rays = []
    if args.rays:
        if not args.root:
            raise CliError(EXIT_INVALID, "--rays needs --root for the basin chart")
        try:
            chart = chart_at_root(m, _snap_root(m, _parse_complex(args.root), args.root))
            rays = list(trace_rays(chart, _parse_angles(args.rays), TraceOptions()).values())
        except ValueError as exc:
            raise CliError(EXIT_NUMERICAL, f"ray overlay failed: {exc}") from exc
    rgb = cls.render_dynamical(
        m,
        region=region,
        resolution=args.res,
        budget=args.budget,
        rays=rays,
        invert=args.invert,
        workers=args.threads,
    )
    base, ext = os.path.splitext(_out_path(args.out))
    comment = "config=" + json.dumps(config, sort_keys=True)
    if ext.lower() == ".ppm":
        written = [cls.write_ppm(base + ".ppm", rgb, comment)]
        png = cls.write_png(base + ".png", rgb, comment)
        if png:
            written.append(png)
    elif ext.lower() == ".png":
        png = cls.write_png(base + ".png", rgb, comment)
        written = [cls.write_ppm(base + ".ppm", rgb, comment)]
        if png:
            written.append(png)
    else:
        written = cls.write_image(base + ext, rgb, comment)
    return {"config": config, "written": written}


def _cmd_render_par(args) -> dict:
    region = _region_from(args)
    config = {
        "command": "render-par",
        "region": list(region),
        "resolution": args.res,
        "budget": args.budget,
        "period_guard": not args.no_period_guard,
        "threads": args.threads,
    }
    rgb, codes = cls.render_parameter(
        region=region,
        resolution=args.res,
        budget=args.budget,
        workers=args.threads,
        period_guard=not args.no_period_guard,
    )
    base, ext = os.path.splitext(_out_path(args.out))
    comment = "config=" + json.dumps(config, sort_keys=True)
    written = [cls.write_ppm(base + ".ppm", rgb, comment)]
    png = cls.write_png(base + ".png", rgb, comment)
    if png:
        written.append(png)
    written.append(cls.write_type_grid(base + ".labels.bin", codes, region, config))
    names = {code: label.value for label, code in cls.TYPE_CODES.items()}
    names[cls.MASKED_CODE] = "masked"
    vals, counts = np.unique(codes, return_counts=True)
    return {
        "config": config,
        "written": written,
        "label_counts": {names[int(v)]: int(n) for v, n in zip(vals, counts)},
    }


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser() -> _Parser:
    parser = _Parser(prog="newton-rays", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_poly(p):
        p.add_argument("--poly", required=True, help="preset or low-first coefficients")

    p = sub.add_parser("map", help="construct a Newton map and dump its data")
    add_poly(p)
    p.add_argument("--out", help="write the full map JSON here")
    p.set_defaults(fn=_cmd_map)

    p = sub.add_parser("trace-ray", help="trace internal rays in one basin")
    add_poly(p)
    p.add_argument("--root", required=True, help="root whose basin carries the rays")
    p.add_argument("--angles", required=True, help="comma-separated fractions")
    p.add_argument("--order", type=int, default=24, help="chart series order")
    p.add_argument("--out", help="write the ray report JSON here")
    p.set_defaults(fn=_cmd_trace_ray)

    p = sub.add_parser("graph", help="build the level-k ray graph")
    add_poly(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--out", help="write the graph JSON here")
    p.add_argument("--dot", help="write a DOT rendering here")
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("cut-angles", help="scan cut angles for a cubic basin pair")
    add_poly(p)
    p.add_argument("--qmax", type=int, default=256)
    p.add_argument("--pair", help="two basin centers, e.g. 1,0.5+0.8i")
    p.add_argument("--out", help="write the angle report JSON here")
    p.set_defaults(fn=_cmd_cut_angles)

    p = sub.add_parser("curve-c", help="separating curve angle and curve")
    add_poly(p)
    p.add_argument("--qmax", type=int, default=64)
    p.add_argument("--pair", help="two root indices fixing the basin orientation")
    p.add_argument("--out", help="write the curve JSON here")
    p.set_defaults(fn=_cmd_curve_c)

    p = sub.add_parser("converge", help="degenerating-family convergence experiment")
    p.add_argument("--family", default=fam.QUARTIC_ROOT_ESCAPE,
                   choices=[fam.QUARTIC_ROOT_ESCAPE, fam.CUBIC_PERTURB])
    p.add_argument("--R", required=True, help="comma-separated parameters")
    p.add_argument("--angles", required=True, help="comma-separated ray angles")
    p.add_argument("--out", help="write the CSV report here")
    p.add_argument("--json", help="write the JSON bundle here")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when any isomorphism verdict is indeterminate")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_converge)

    p = sub.add_parser("escape-check", help="critical-orbit escape test")
    p.add_argument("--family", default=fam.QUARTIC_ROOT_ESCAPE)
    p.add_argument("--R", required=True, help="comma-separated parameters")
    p.add_argument("--k", type=int, default=2, help="orbit length to test")
    p.add_argument("--eps", type=float, default=0.1, help="sphere distance to infinity")
    p.add_argument("--out", help="write the verdict JSON here")
    p.set_defaults(fn=_cmd_escape_check)

    p = sub.add_parser("classify", help="hyperbolic type of a period-two member")
    p.add_argument("--c", required=True, help="slice parameter")
    p.add_argument("--budget", type=int, default=400)
    p.add_argument("--res", type=int, default=256)
    p.add_argument("--out", help="write the label grid here")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when the type is unresolved")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("render-dyn", help="basin raster with ray overlays")
    add_poly(p)
    p.add_argument("--center", default="0+0i")
    p.add_argument("--width", type=float, default=4.0)
    p.add_argument("--region", help="x0,x1,y0,y1 (overrides center/width)")
    p.add_argument("--res", type=int, default=512)
    p.add_argument("--budget", type=int, default=160)
    p.add_argument("--rays", help="comma-separated angles to overlay")
    p.add_argument("--root", help="root whose basin carries the overlay rays")
    p.add_argument("--invert", action="store_true", help="render the 1/z chart")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True, help="image path (.ppm/.png)")
    p.set_defaults(fn=_cmd_render_dyn)

    p = sub.add_parser("render-par", help="type map of the period-two slice")
    p.add_argument("--center", default="0.5+0i")
    p.add_argument("--width", type=float, default=2.5)
    p.add_argument("--region", help="x0,x1,y0,y1 (overrides center/width)")
    p.add_argument("--res", type=int, default=512)
    p.add_argument("--budget", type=int, default=300)
    p.add_argument("--no-period-guard", action="store_true",
                   help="keep free cycles of period other than two")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True, help="image path (.ppm/.png)")
    p.set_defaults(fn=_cmd_render_par)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        summary = args.fn(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc), "exit_code": exc.code}, sort_keys=True))
        return exc.code
    except fam.HypothesisError as exc:
        print(
            json.dumps(
                {"error": str(exc), "hypothesis": exc.hypothesis, "exit_code": EXIT_NUMERICAL},
                sort_keys=True,
            )
        )
        return EXIT_NUMERICAL
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
