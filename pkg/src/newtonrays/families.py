"""Degenerating Newton-map families and ray-graph convergence experiments.

A family is a one-parameter curve of Newton maps whose members lose a root
to infinity (or approach a distinguished map) as the parameter grows.  The
experiment machinery traces the same rational internal rays in the limit map
and in each member, matches basin centers across maps by deformation
tracking, and reports Hausdorff distances and combinatorial-isomorphism
verdicts between the member graphs and the limit graph.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from statistics import median
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bottcher import (
    BottcherChart,
    DeformationRecord,
    chart_at_preimage,
    chart_at_root,
    track_deformation,
)
from .graphs import (
    RayGraph,
    _ComponentTree,
    _root_centers,
    build_ray_graph,
    graph_hausdorff,
    graph_iso,
    graph_to_dict,
)
from .maps import (
    MapRep,
    NewtonSource,
    critical_points,
    newton_from_source,
    newton_of_poly,
    poles,
)
from .rays import TraceOptions, trace_rays
from .sphere import INF, Poly, SpherePoint, normalize_angle, sphere_dist

__all__ = [
    "QUARTIC_ROOT_ESCAPE",
    "CUBIC_PERTURB",
    "PER2_SLICE",
    "AffineMap",
    "FamilySpec",
    "HypothesisError",
    "ExperimentRow",
    "ConvergenceReport",
    "make_family",
    "family_limit",
    "normalize_roots",
    "per2_polynomial",
    "trace_gamma",
    "convergence_experiment",
    "critical_escape_check",
    "report_to_csv",
    "report_to_json",
    "experiment_from_config",
]

QUARTIC_ROOT_ESCAPE = "quartic_root_escape"
CUBIC_PERTURB = "cubic_perturb"
PER2_SLICE = "per2_slice"
_KINDS = (QUARTIC_ROOT_ESCAPE, CUBIC_PERTURB, PER2_SLICE)

_CUBE_ROOTS = tuple(np.exp(2j * np.pi * k / 3) for k in range(3))

# how far past the typical nearest-neighbour spacing a root must sit before
# the normalization treats it as escaping
ESCAPE_FACTOR = 10.0
ORBIT_BUDGET = 200
CRITICAL_FLOOR = 1e-4
CYCLE_TOL = 1e-8


class HypothesisError(ValueError):
    """A convergence-experiment precondition failed; `.hypothesis` names it."""

    def __init__(self, hypothesis: str, detail: str):
        super().__init__(f"{hypothesis}: {detail}")
        self.hypothesis = hypothesis


@dataclass(frozen=True)
class AffineMap:
    """z -> a*z + b on the sphere (infinity is fixed)."""

    a: complex
    b: complex

    def __call__(self, z) -> SpherePoint:
        p = SpherePoint.of(z)
        if p.is_infinite:
            return INF
        return SpherePoint(self.a * p.value + self.b)

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.a, -self.b / self.a)


def per2_polynomial(c: complex) -> Poly:
    """Quartic slice with superattracting two-cycle 0 -> 1 -> 0.

    P(z) = z^4/12 - c z^3/6 + (4c-3) z/12 + (3-4c)/12; the closed forms
    P(1) = P'(1) = (1-2c)/12 make 1 map to 0 under the Newton map for every
    c != 1/2, while P(0)/P'(0) = -1 sends 0 to 1.
    """
    c = complex(c)
    return Poly(
        [
            (3.0 - 4.0 * c) / 12.0,
            (4.0 * c - 3.0) / 12.0,
            0.0,
            -c / 6.0,
            1.0 / 12.0,
        ]
    )


@dataclass(frozen=True)
class FamilySpec:
    """One member of a named degenerating family.

    kinds:
      quartic_root_escape -- Newton map of (z-a)(z-b)(z-c)(z-R) with fixed
        base roots and escaping parameter R
      cubic_perturb -- Newton map of z^3 + z/n - 1 with parameter n
      per2_slice -- Newton map of the two-cycle quartic slice at parameter c
    """

    kind: str
    parameter: complex
    base: Optional[Tuple[complex, ...]] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "parameter", complex(self.parameter))
        if self.kind == QUARTIC_ROOT_ESCAPE:
            base = self.base if self.base is not None else _CUBE_ROOTS
            base = tuple(complex(b) for b in base)
            if len(base) != 3:
                raise ValueError("quartic_root_escape requires three base roots")
            pts = base + (self.parameter,)
            for i in range(4):
                for j in range(i + 1, 4):
                    if abs(pts[i] - pts[j]) < 1e-12 * (1 + abs(pts[i])):
                        raise ValueError(
                            "base roots must be pairwise distinct and distinct "
                            "from the escaping root"
                        )
            object.__setattr__(self, "base", base)
        elif self.base is not None:
            raise ValueError(f"{self.kind} takes no base roots")

    def polynomial(self) -> Poly:
        if self.kind == QUARTIC_ROOT_ESCAPE:
            return Poly.from_roots(list(self.base) + [self.parameter])
        if self.kind == CUBIC_PERTURB:
            n = self.parameter
            if n == 0:
                raise ValueError("cubic_perturb parameter must be nonzero")
            return Poly([-1.0, 1.0 / n, 0.0, 1.0])
        return per2_polynomial(self.parameter)

    @property
    def degenerate(self) -> bool:
        """True when the generating polynomial has a multiple root."""
        if self.kind != PER2_SLICE:
            return False
        from .sphere import solve_poly

        rs = solve_poly(self.polynomial().coeffs)
        scale = 1.0 + float(np.max(np.abs(rs)))
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                if abs(rs[i] - rs[j]) < 1e-7 * scale:
                    return True
        return False


def make_family(spec: FamilySpec) -> MapRep:
    """Newton map of the family member described by `spec`."""
    if spec.degenerate:
        raise ValueError(
            "degenerate family member: generating polynomial has a multiple root"
        )
    if spec.kind == QUARTIC_ROOT_ESCAPE:
        roots = tuple((r, 1) for r in spec.base) + ((spec.parameter, 1),)
        return newton_from_source(NewtonSource(roots=roots))
    return newton_of_poly(spec.polynomial())


def family_limit(spec: FamilySpec) -> MapRep:
    """The reduction the family degenerates to as its parameter grows."""
    if spec.kind == QUARTIC_ROOT_ESCAPE:
        roots = tuple((r, 1) for r in spec.base)
        return newton_from_source(NewtonSource(roots=roots))
    if spec.kind == CUBIC_PERTURB:
        roots = tuple((r, 1) for r in _CUBE_ROOTS)
        return newton_from_source(NewtonSource(roots=roots))
    raise ValueError("per2_slice has no root-escape limit")


def _root_key(z: complex) -> Tuple[float, float]:
    return (z.real, z.imag)


def normalize_roots(
    m: MapRep, escape_factor: float = ESCAPE_FACTOR
) -> Tuple[MapRep, AffineMap]:
    """Affinely move a distinguished pair of roots to 0 and 1.

    Roots whose nearest-neighbour distance exceeds `escape_factor` times the
    median spacing are treated as escaping and excluded; among the remaining
    roots the pair of maximal mutual distance is selected, ordered by
    (re, im), and sent to (0, 1).  Because affine conjugation rescales all
    mutual distances by one factor, re-application selects the same pair and
    is the identity.
    """
    if m.source is None:
        raise ValueError("map carries no root data; build it from a Newton source")
    roots = [complex(r) for r, _ in m.source.roots]
    mults = [k for _, k in m.source.roots]
    if len(roots) < 2:
        raise ValueError("normalization requires at least two roots")
    scale = 1.0 + max(abs(r) for r in roots)
    nn = [min(abs(r - s) for s in roots if s is not r) for r in roots]
    med = median(nn)
    if med < 1e-9 * scale:
        raise ValueError("all roots lie within clustering tolerance of one point")
    keep = [i for i, d in enumerate(nn) if d <= escape_factor * med]
    if len(keep) < 2:
        raise ValueError("fewer than two non-escaping roots")
    best: Optional[Tuple[int, int]] = None
    best_d = -1.0
    for a_pos, i in enumerate(keep):
        for j in keep[a_pos + 1 :]:
            d = abs(roots[i] - roots[j])
            if d > best_d + 1e-12 * scale:
                best, best_d = (i, j), d
    if best_d < 1e-9 * scale:
        raise ValueError("all roots lie within clustering tolerance of one point")
    i, j = best
    p, q = roots[i], roots[j]
    if _root_key(q) < _root_key(p):
        p, q = q, p
    aff = AffineMap(1.0 / (q - p), -p / (q - p))
    moved = tuple((aff(r).value, k) for r, k in zip(roots, mults))
    return newton_from_source(NewtonSource(roots=moved, lead=m.source.lead)), aff


# ---------------------------------------------------------------------------
# gamma graphs: the same (component path, angles) request on several maps

GammaEntry = Tuple[Tuple[int, ...], Tuple[Fraction, ...]]


def _normalize_gamma(gamma: Sequence) -> List[GammaEntry]:
    out: Dict[Tuple[int, ...], List[Fraction]] = {}
    order: List[Tuple[int, ...]] = []
    for path, angles in gamma:
        key = tuple(int(p) for p in path)
        if not key:
            raise ValueError("empty component path in gamma specification")
        if key not in out:
            out[key] = []
            order.append(key)
        for a in angles:
            t = normalize_angle(Fraction(a))
            if t not in out[key]:
                out[key].append(t)
    return [(k, tuple(out[k])) for k in order]


def _path_label(path: Tuple[int, ...]) -> str:
    return f"b{path[0]}" + "".join(f".{j}" for j in path[1:])


def _limit_charts(
    limit: MapRep, paths: Sequence[Tuple[int, ...]]
) -> Dict[Tuple[int, ...], BottcherChart]:
    """Charts of the limit map along each requested pullback path."""
    centers = _root_centers(limit)
    immediate: Dict[str, BottcherChart] = {}
    for i in sorted({p[0] for p in paths}):
        if not 0 <= i < len(centers):
            raise ValueError(f"basin index {i} out of range")
        try:
            immediate[f"b{i}"] = chart_at_root(limit, centers[i], label=f"b{i}")
        except ValueError as exc:
            if "superattracting" in str(exc):
                # a multiple root: the immediate basin has degree > 2
                raise HypothesisError(
                    "immediate_basin_degree",
                    f"basin b{i} center is not a simple superattracting root",
                ) from exc
            raise
    tree = _ComponentTree(limit, immediate)
    out: Dict[Tuple[int, ...], BottcherChart] = {}
    for path in paths:
        label = f"b{path[0]}"
        for step in path[1:]:
            kids = tree.children(label)
            label = f"{label}.{step}"
            if label not in kids:
                raise ValueError(f"no pullback component {label}")
        out[path] = tree.charts[label]
    return out


def _member_charts(
    member: MapRep,
    limit: MapRep,
    limit_charts: Dict[Tuple[int, ...], BottcherChart],
) -> Tuple[Dict[Tuple[int, ...], BottcherChart], List[DeformationRecord]]:
    """Charts of a member map at the deformations of the limit centers."""
    records: List[DeformationRecord] = []
    tracked: Dict[str, Tuple[BottcherChart, DeformationRecord]] = {}

    def chart_for(path: Tuple[int, ...]) -> BottcherChart:
        label = _path_label(path)
        got = tracked.get(label)
        if got is not None:
            return got[0]
        base_center = limit_charts_by_label[label].center
        rec = track_deformation(limit, member, base_center)
        if len(path) == 1:
            chart = chart_at_root(member, rec.tracked_center, label=label)
        else:
            parent = chart_for(path[:-1])
            chart = chart_at_preimage(member, parent, rec.tracked_center, label=label)
        tracked[label] = (chart, rec)
        records.append(rec)
        return chart

    limit_charts_by_label: Dict[str, BottcherChart] = {}
    for path, chart in limit_charts.items():
        for k in range(1, len(path) + 1):
            prefix = path[:k]
            limit_charts_by_label.setdefault(_path_label(prefix), _chart_prefix(chart, len(path) - k))

    out = {path: chart_for(path) for path in limit_charts}
    return out, records


def _chart_prefix(chart: BottcherChart, up: int) -> BottcherChart:
    for _ in range(up):
        chart = chart.parent
    return chart


def trace_gamma(
    m: MapRep,
    gamma: Sequence,
    limit: Optional[MapRep] = None,
    opts: Optional[TraceOptions] = None,
    role: str = "gamma",
) -> Tuple[RayGraph, List[DeformationRecord]]:
    """Trace the requested rays on `m` and assemble them into a graph.

    With `limit` given, the component centers of `m` are located by
    deformation tracking from the limit map's centers, so the same path
    indices address corresponding components on both maps.
    """
    entries = _normalize_gamma(gamma)
    paths = [p for p, _ in entries]
    opts = opts or TraceOptions(max_levels=128)
    records: List[DeformationRecord] = []
    if limit is None:
        charts = _limit_charts(m, paths)
    else:
        charts = _limit_charts(limit, paths)
        charts, records = _member_charts(m, limit, charts)
    rays = []
    for path, angles in entries:
        traced = trace_rays(charts[path], list(angles), opts)
        rays.extend(traced[a] for a in angles)
    return build_ray_graph(rays, role=role), records


# ---------------------------------------------------------------------------
# hypothesis checks on the limit side


def _close_pass(a: SpherePoint, b: SpherePoint) -> bool:
    """Chordal coincidence, guarded against huge finite points.

    Two far-out finite iterates can be chordally indistinguishable while
    their true orbits separate along the repelling direction at infinity, so
    a pair of huge points must also agree in plane-relative terms.
    """
    if sphere_dist(a, b) >= CYCLE_TOL:
        return False
    if a.is_infinite or b.is_infinite:
        return a.is_infinite and b.is_infinite
    ma = max(abs(a.value), abs(b.value))
    if ma > 1e9:
        return abs(a.value - b.value) <= 1e-6 * ma
    return True


def _orbit_cycle(
    m: MapRep, start: SpherePoint, budget: int
) -> Tuple[List[SpherePoint], int, int]:
    """Forward orbit until a revisit; returns (orbit, preperiod, period).

    A step from within roundoff range of a pole is snapped to infinity:
    landing points are only known to ~1e-15, and iterating a near-pole point
    literally would replace the true pole-through-infinity orbit with a
    garbage excursion.
    """
    pole_pts = [p for p, _ in poles(m) if not p.is_infinite]
    orbit = [start]
    for _ in range(budget):
        cur = orbit[-1]
        if not cur.is_infinite and any(
            abs(cur.value - p.value) < 1e-7 * (1 + abs(p.value)) for p in pole_pts
        ):
            orbit.append(INF)
        else:
            orbit.append(m(cur))
        last = orbit[-1]
        for k, prev in enumerate(orbit[:-1]):
            if _close_pass(last, prev):
                return orbit[:-1], k, len(orbit) - 1 - k
    raise HypothesisError(
        "landing_orbit_not_eventually_periodic",
        f"no cycle within {budget} steps from {start}",
    )


def _cycle_multiplier(m: MapRep, cycle: Sequence[SpherePoint]) -> complex:
    if len(cycle) == 1:
        return m.multiplier_at(cycle[0])
    lam = 1.0 + 0j
    for p in cycle:
        if p.is_infinite:
            lam *= m.multiplier_at(INF)
        else:
            lam *= m.derivative_value(p.value)
    return lam


def check_hypotheses(
    limit: MapRep,
    graph: RayGraph,
    charts: Dict[Tuple[int, ...], BottcherChart],
    orbit_budget: int = ORBIT_BUDGET,
    critical_floor: float = CRITICAL_FLOOR,
) -> List[str]:
    """Verify the perturbation-theorem hypotheses on the limit graph.

    Raises HypothesisError on a hard failure; returns warning strings for
    conditions that are reported but do not block the experiment.
    """
    warnings: List[str] = []
    if not graph.is_connected():
        raise HypothesisError("gamma_disconnected", "the limit graph is not connected")
    for path, chart in charts.items():
        if len(path) == 1 and chart.local_degree != 2:
            raise HypothesisError(
                "immediate_basin_degree",
                f"immediate basin b{path[0]} has degree {chart.local_degree}, "
                "the convergence criterion requires degree 2",
            )
        # pullback components are degree-one by construction: building their
        # chart already rejects critical points on the chain
    crits = [p for p, _ in critical_points(limit)]
    seen: List[SpherePoint] = []
    for ray in graph.rays:
        x = ray.landing_point
        if x is None:
            raise HypothesisError(
                "limit_ray_unlanded",
                f"ray {graph.ray_tag(ray)} of the limit graph did not land",
            )
        if any(sphere_dist(x, s) < CYCLE_TOL for s in seen):
            continue
        seen.append(x)
        orbit, pre, per = _orbit_cycle(limit, x, orbit_budget)
        lam = _cycle_multiplier(limit, orbit[pre : pre + per])
        if abs(lam) <= 1.0 + 1e-9:
            raise HypothesisError(
                "landing_orbit_not_repelling",
                f"landing point {x} reaches a cycle of multiplier |{abs(lam):.6g}|",
            )
        d0 = min(sphere_dist(x, c) for c in crits)
        if d0 < critical_floor:
            # a landing point may legitimately sit at a critical Julia cut
            # point shared by several rays; the perturbation theorem then no
            # longer guarantees the combinatorics, so report rather than block
            warnings.append(
                f"landing point {x} is within {d0:.3g} of a critical point; "
                "graph combinatorics may change under perturbation"
            )
        for pt in orbit[1:]:
            d = min(sphere_dist(pt, c) for c in crits)
            if d < critical_floor:
                raise HypothesisError(
                    "landing_orbit_meets_critical_point",
                    f"orbit of landing point {x} passes within {d:.3g} of a "
                    "critical point",
                )
    return warnings


# ---------------------------------------------------------------------------
# the convergence experiment


@dataclass(frozen=True)
class ExperimentRow:
    parameter: complex
    d_h: float
    iso: Optional[bool]
    max_residual: float
    graph: RayGraph
    records: Tuple[DeformationRecord, ...]


@dataclass(frozen=True)
class ConvergenceReport:
    rows: Tuple[ExperimentRow, ...]
    limit_graph: RayGraph
    warnings: Tuple[str, ...] = ()

    @property
    def parameters(self) -> Tuple[complex, ...]:
        return tuple(r.parameter for r in self.rows)

    @property
    def d_h_values(self) -> Tuple[float, ...]:
        return tuple(r.d_h for r in self.rows)

    @property
    def strictly_decreasing(self) -> bool:
        ds = self.d_h_values
        return all(b < a for a, b in zip(ds, ds[1:]))

    @property
    def final_d_h(self) -> float:
        return self.rows[-1].d_h

    @property
    def all_iso(self) -> bool:
        return all(r.iso is True for r in self.rows)


def convergence_experiment(
    family: Sequence[FamilySpec],
    gamma: Sequence,
    limit: Optional[MapRep] = None,
    opts: Optional[TraceOptions] = None,
    orbit_budget: int = ORBIT_BUDGET,
    critical_floor: float = CRITICAL_FLOOR,
    max_workers: Optional[int] = None,
) -> ConvergenceReport:
    """Compare member gamma graphs against the limit gamma graph.

    The limit map's graph is traced once and the theorem hypotheses are
    checked on it (connectedness, immediate-basin degrees, landing orbits
    eventually repelling periodic and away from critical points).  Members
    are then processed independently, possibly in parallel; the report rows
    are a deterministic ordered reduction sorted by parameter.
    """
    specs = list(family)
    if not specs:
        raise ValueError("empty family sweep")
    kind = specs[0].kind
    base = specs[0].base
    for s in specs[1:]:
        if s.kind != kind or s.base != base:
            raise ValueError("sweep members must share kind and base roots")
    if limit is None:
        limit = family_limit(specs[0])
    entries = _normalize_gamma(gamma)
    paths = [p for p, _ in entries]
    limit_charts = _limit_charts(limit, paths)
    opts = opts or TraceOptions(max_levels=128)
    limit_rays = []
    for path, angles in entries:
        traced = trace_rays(limit_charts[path], list(angles), opts)
        limit_rays.extend(traced[a] for a in angles)
    limit_graph = build_ray_graph(limit_rays, role="gamma_limit")
    warnings = check_hypotheses(
        limit, limit_graph, limit_charts, orbit_budget, critical_floor
    )

    def row_for(spec: FamilySpec) -> ExperimentRow:
        member = make_family(spec)
        charts, records = _member_charts(member, limit, limit_charts)
        rays = []
        for path, angles in entries:
            traced = trace_rays(charts[path], list(angles), opts)
            rays.extend(traced[a] for a in angles)
        g = build_ray_graph(rays, role=f"gamma[{_fmt_param(spec.parameter)}]")
        return ExperimentRow(
            parameter=spec.parameter,
            d_h=graph_hausdorff(g, limit_graph),
            iso=graph_iso(g, limit_graph),
            max_residual=max((r.residual for r in records), default=0.0),
            graph=g,
            records=tuple(records),
        )

    if max_workers is not None and max_workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(row_for, specs))
    else:
        rows = [row_for(s) for s in specs]
    rows.sort(key=lambda r: (r.parameter.real, r.parameter.imag))
    return ConvergenceReport(
        rows=tuple(rows), limit_graph=limit_graph, warnings=tuple(warnings)
    )


def critical_escape_check(
    family: Sequence[FamilySpec], k: int, eps: float
) -> List[Tuple[complex, bool]]:
    """Does the additional critical point nearest infinity stay near it?

    For each member, the free critical point closest to infinity in the
    sphere metric is iterated k steps; the verdict is True when every
    iterate stays within sphere distance `eps` of infinity.
    """
    out: List[Tuple[complex, bool]] = []
    for spec in family:
        if spec.kind != QUARTIC_ROOT_ESCAPE:
            raise ValueError("critical escape check requires an escaping-root family")
        m = make_family(spec)
        roots = [complex(r) for r, _ in m.source.roots]
        free = [
            p
            for p, _ in critical_points(m)
            if p.is_infinite
            or all(abs(p.value - r) > 1e-8 * (1 + abs(r)) for r in roots)
        ]
        if not free:
            raise ValueError("no additional critical points found")
        c = min(free, key=lambda p: sphere_dist(p, INF))
        ok = True
        z = c
        for _ in range(k + 1):
            if sphere_dist(z, INF) >= eps:
                ok = False
                break
            z = m(z)
        out.append((spec.parameter, ok))
    return out


# ---------------------------------------------------------------------------
# report serialization


def _fmt_param(p: complex) -> str:
    if p.imag == 0:
        v = p.real
        return str(int(v)) if v == int(v) else repr(v)
    return f"{p.real!r}{p.imag:+}j"


def report_to_csv(report: ConvergenceReport) -> str:
    lines = ["parameter,d_H,iso,max_residual"]
    for row in report.rows:
        iso = {True: "true", False: "false", None: "indeterminate"}[row.iso]
        lines.append(
            f"{_fmt_param(row.parameter)},{row.d_h!r},{iso},{row.max_residual!r}"
        )
    return "\n".join(lines) + "\n"


def report_to_json(report: ConvergenceReport) -> dict:
    return {
        "limit_graph": graph_to_dict(report.limit_graph),
        "warnings": list(report.warnings),
        "rows": [
            {
                "parameter": [row.parameter.real, row.parameter.imag],
                "d_H": row.d_h,
                "iso": row.iso,
                "max_residual": row.max_residual,
                "graph": graph_to_dict(row.graph),
                "records": [
                    {
                        "base_center": [r.base_center.real, r.base_center.imag],
                        "tracked_center": [
                            r.tracked_center.real,
                            r.tracked_center.imag,
                        ],
                        "preperiod": r.preperiod,
                        "period": r.period,
                        "residual": r.residual,
                    }
                    for r in row.records
                ],
            }
            for row in report.rows
        ],
    }


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def experiment_from_config(cfg: dict) -> ConvergenceReport:
    """Run an experiment from a plain-dict config.

    Shape: {"family": {"kind": ..., "base"?: [[re, im], ...]},
            "parameters": [...], "gamma": [[path, [angles...]], ...],
            "tolerances"?: {"orbit_budget"?, "critical_floor"?, "max_workers"?}}
    Angles are strings like "1/2" or numbers.
    """
    fam = cfg["family"]
    base = fam.get("base")
    if base is not None:
        base = tuple(_parse_complex(b) for b in base)
    specs = [
        FamilySpec(kind=fam["kind"], parameter=_parse_complex(p), base=base)
        for p in cfg["parameters"]
    ]
    gamma = [
        (tuple(int(i) for i in path), [Fraction(str(a)) for a in angles])
        for path, angles in cfg["gamma"]
    ]
    tol = cfg.get("tolerances", {})
    return convergence_experiment(
        specs,
        gamma,
        orbit_budget=int(tol.get("orbit_budget", ORBIT_BUDGET)),
        critical_floor=float(tol.get("critical_floor", CRITICAL_FLOOR)),
        max_workers=tol.get("max_workers"),
    )
