"""Ray graphs on the sphere: Newton graphs, separating curves, cut angles.

A ray graph is a union of internal rays glued at shared vertices: basin
centers on the inner ends and (co-)landing points on the outer ends.  Assembly
refines every landed ray, then binds ray ends to vertices by a deterministic
single-threaded reduction over the refined points sorted by a canonical key,
so co-landing rays share a vertex regardless of input order or thread count.

Provided builders:

* ``newton_graph``       -- the invariant graph of fixed rays and its pullbacks,
* ``build_curve_gamma``  -- the closed curve through two basins and their
                            shared boundary pole (angles 0 and 1/2),
* ``build_curve_L``      -- the connected cubic partition graph of ten rays,
* ``build_curve_C``      -- the Jordan curve of ten rays two pullback levels
                            deep whose inside captures the free critical point,
* ``build_graph_G``      -- the forward-invariant union of the iterates of C,
* ``cut_angles``         -- the scan for angles whose opposite rays co-land,
* ``separable_check``    -- the quartic pole-separation test.

Graphs compare two ways: ``graph_hausdorff`` (chordal metric on sampled
clouds) and ``graph_iso`` (tagged incidence structures and co-landing
partitions).  Verdicts that depend on unresolved co-landings come back as
``None`` rather than a silent boolean.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .bottcher import BottcherChart, chart_at_preimage, chart_at_root
from .maps import MapRep, advance, critical_points, poles
from .rays import (
    BUDGET_EXHAUSTED,
    InternalRay,
    LANDED,
    TERMINATED_PRECRITICAL,
    TraceOptions,
    angle_orbit,
    coland,
    trace_ray,
    trace_rays,
)
from .sphere import INF, SpherePoint, normalize_angle, sphere_dist, sphere_dist_arr, sphere_embed

__all__ = [
    "DELTA_S",
    "VERTEX_TOL",
    "CurvePrecondition",
    "RayGraph",
    "CutAngleSet",
    "build_ray_graph",
    "immediate_charts",
    "newton_graph",
    "cut_angles",
    "shared_pole_pairs",
    "build_curve_gamma",
    "build_curve_L",
    "build_curve_C",
    "build_graph_G",
    "find_curve_c_angle",
    "graph_hausdorff",
    "graph_hausdorff_directed",
    "graph_min_distance",
    "cycle_polyline",
    "winding_contains",
    "graph_iso",
    "separable_check",
    "graph_to_dict",
    "graph_to_dot",
]

# Sampling density (sphere metric) used for Hausdorff comparisons; landing
# regions are denser automatically because trace steps contract there.
DELTA_S = 1e-3
# Two refined points closer than this are the same vertex.
VERTEX_TOL = 1e-6
# Raw landing estimates farther apart than this can never co-land.
PREFILTER_TOL = 1e-3

CENTER, LANDING = "center", "landing"


class CurvePrecondition(ValueError):
    """A named precondition of a curve construction failed ("i", "ii", "iii")."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"precondition ({condition}) failed: {message}")
        self.condition = condition


# ---------------------------------------------------------------------------
# RayGraph: rays glued at vertices


def _canonical_point_key(p: SpherePoint):
    if p.is_infinite:
        return (1, 0.0, 0.0)
    return (0, p.value.real, p.value.imag)


@dataclass
class RayGraph:
    """Internal rays plus the vertex identifications of their ends.

    ``incidence`` maps ``(ray_index, end)`` with ``end`` in ``{"center",
    "landing"}`` to a vertex id; rays that did not land have no landing entry
    (an "orphan end"), which connected roles treat as a defect.
    """

    role: str
    rays: List[InternalRay]
    vertices: List[Tuple[SpherePoint, str]]
    incidence: Dict[Tuple[int, str], int]
    notes: List[str] = field(default_factory=list)
    _clouds: Dict[float, np.ndarray] = field(default_factory=dict, repr=False)

    def ray_tag(self, i: int) -> Tuple[str, Fraction]:
        ray = self.rays[i]
        return (ray.chart.label, ray.angle)

    def vertex_degree(self, vid: int) -> int:
        return sum(1 for v in self.incidence.values() if v == vid)

    def adjacency(self) -> Dict[int, set]:
        adj: Dict[int, set] = {v: set() for v in range(len(self.vertices))}
        for i in range(len(self.rays)):
            a = self.incidence.get((i, CENTER))
            b = self.incidence.get((i, LANDING))
            if a is not None and b is not None:
                adj[a].add(b)
                adj[b].add(a)
        return adj

    def component_of(self, vid: int) -> set:
        adj = self.adjacency()
        seen = {vid}
        todo = [vid]
        while todo:
            for nxt in adj[todo.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        if any((i, LANDING) not in self.incidence for i in range(len(self.rays))):
            return False
        return len(self.component_of(0)) == len(self.vertices)

    def is_cycle(self) -> bool:
        return self.is_connected() and all(
            self.vertex_degree(v) == 2 for v in range(len(self.vertices))
        )

    def orphan_ends(self) -> List[int]:
        return [i for i in range(len(self.rays)) if (i, LANDING) not in self.incidence]

    def vertex_points(self, kind: Optional[str] = None) -> List[SpherePoint]:
        return [p for p, k in self.vertices if kind is None or k == kind]

    def sample_cloud(self, max_gap: float = DELTA_S) -> np.ndarray:
        """All ray samples embedded in R^3, subdivided to the requested spacing."""
        cached = self._clouds.get(max_gap)
        if cached is not None:
            return cached
        pts: List[complex] = []
        for i, ray in enumerate(self.rays):
            if not ray.samples:
                raise ValueError("graph rays carry no stored samples")
            run = [complex(ray.chart.center)]
            run.extend(s.as_complex() for s in ray.samples)
            end = ray.landing_point or ray.approx
            if end is not None:
                run.append(end.as_complex())
            pts.extend(_densify(run, max_gap))
        for p, _ in self.vertices:
            pts.append(p.as_complex())
        cloud = sphere_embed(pts)
        self._clouds[max_gap] = cloud
        return cloud


def _densify(run: Sequence[complex], max_gap: float) -> List[complex]:
    """Subdivide a plane polyline until sphere gaps fall below max_gap."""
    arr = np.asarray(run, complex)
    gaps = sphere_dist_arr(arr[:-1], arr[1:])
    out: List[complex] = [arr[0]]
    for a, b, g in zip(arr[:-1], arr[1:], gaps):
        finite = np.isfinite(a.real) and np.isfinite(b.real)
        if finite and g > max_gap:
            n = min(64, int(math.ceil(g / max_gap)))
            for j in range(1, n):
                out.append(a + (b - a) * (j / n))
        out.append(b)
    return out


def build_ray_graph(
    rays: Sequence[InternalRay],
    role: str,
    vertex_tol: float = VERTEX_TOL,
    refine: bool = True,
) -> RayGraph:
    """Glue rays into a graph, binding ends to shared vertices.

    Landed rays are refined first (certificates attached); vertex resolution
    is a deterministic reduction over the refined points sorted by a
    canonical key, so the vertex ids do not depend on ray input order.
    """
    rays = list(rays)
    if refine:
        for ray in rays:
            ray.ensure_certificate()
    ends: List[Tuple[int, str, SpherePoint]] = []
    for i, ray in enumerate(rays):
        ends.append((i, CENTER, SpherePoint.of(ray.chart.center)))
        if ray.landed and ray.landing_point is not None:
            ends.append((i, LANDING, ray.landing_point))
    ends.sort(key=lambda e: (_canonical_point_key(e[2]), e[1], e[0]))

    vertices: List[Tuple[SpherePoint, str]] = []
    incidence: Dict[Tuple[int, str], int] = {}
    for i, kind, pt in ends:
        vid = None
        for j, (q, _) in enumerate(vertices):
            if sphere_dist(pt, q) < vertex_tol:
                vid = j
                break
        if vid is None:
            vertices.append((pt, kind))
            vid = len(vertices) - 1
        incidence[(i, kind)] = vid
    return RayGraph(role=role, rays=rays, vertices=vertices, incidence=incidence)


# ---------------------------------------------------------------------------
# Immediate-basin charts and the Newton graph


def _root_centers(m: MapRep) -> List[complex]:
    if m.source is None:
        raise ValueError("map carries no root data; build it from a Newton source")
    cs = [complex(r) for r, _ in m.source.roots]
    return sorted(cs, key=lambda z: (z.real, z.imag))


def immediate_charts(
    m: MapRep, order: Optional[int] = None, test_radius: float = 0.6
) -> Dict[str, BottcherChart]:
    """Validated charts for every immediate basin, labeled b0, b1, ... in
    lexicographic root order."""
    out: Dict[str, BottcherChart] = {}
    for i, r in enumerate(_root_centers(m)):
        label = f"b{i}"
        if order is None:
            out[label] = chart_at_root(m, r, test_radius=test_radius, label=label)
        else:
            out[label] = chart_at_root(
                m, r, order=order, test_radius=test_radius, label=label
            )
    return out


def _fixed_angles(chart: BottcherChart) -> List[Fraction]:
    d = chart.local_degree
    return [Fraction(j, d - 1) for j in range(d - 1)]


class _ComponentTree:
    """Lazily-built tree of basin components under pullback.

    Immediate components are the basins themselves; every other component is
    a degree-one preimage tracked by a chart chain, labeled parent.k with k
    indexing the new centers in lexicographic order.
    """

    def __init__(self, m: MapRep, charts: Dict[str, BottcherChart]):
        self.m = m
        self.charts: Dict[str, BottcherChart] = dict(charts)
        self._children: Dict[str, List[str]] = {}

    def children(self, label: str) -> List[str]:
        got = self._children.get(label)
        if got is not None:
            return got
        chart = self.charts[label]
        centers: List[complex] = []
        for p in self.m.preimages(chart.center):
            if p.is_infinite:
                continue
            z = p.value
            if chart.is_immediate and abs(z - chart.center) < 1e-8 * (
                1 + abs(chart.center)
            ):
                continue
            if all(abs(z - c) > 1e-8 * (1 + abs(c)) for c in centers):
                centers.append(z)
        labels: List[str] = []
        for z in sorted(centers, key=lambda t: (t.real, t.imag)):
            sub = f"{label}.{len(labels)}"
            try:
                self.charts[sub] = chart_at_preimage(self.m, chart, z, label=sub)
            except ValueError as exc:
                raise ValueError(
                    f"pullback of component {label} obstructed: {exc}"
                ) from exc
            labels.append(sub)
        self._children[label] = labels
        return labels

    def pullback(self, label: str, theta: Fraction) -> List[Tuple[str, Fraction]]:
        chart = self.charts[label]
        out: List[Tuple[str, Fraction]] = []
        if chart.is_immediate:
            d = chart.local_degree
            out.extend((label, normalize_angle(Fraction(theta + i, d))) for i in range(d))
        for sub in self.children(label):
            out.append((sub, theta))
        return out


def newton_graph(
    m: MapRep,
    level: int,
    charts: Optional[Dict[str, BottcherChart]] = None,
    opts: Optional[TraceOptions] = None,
) -> RayGraph:
    """The graph of fixed internal rays pulled back ``level`` times.

    Level 0 is the union of the fixed rays of all immediate basins together
    with their common landing point at infinity; each further level adjoins
    every preimage ray, and the result is trimmed to the connected component
    of the vertex at infinity.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    if opts is None:
        # pole landings converge at half the basin rate; give them headroom
        opts = TraceOptions(max_levels=128)
    charts = charts or immediate_charts(m)
    tree = _ComponentTree(m, charts)
    current = {
        (label, theta)
        for label, chart in charts.items()
        for theta in _fixed_angles(chart)
    }
    for _ in range(level):
        nxt = set()
        for label, theta in current:
            nxt.update(tree.pullback(label, theta))
        current = nxt

    by_label: Dict[str, List[Fraction]] = {}
    for label, theta in sorted(current):
        by_label.setdefault(label, []).append(theta)
    rays: List[InternalRay] = []
    dropped: List[str] = []
    for label in sorted(by_label):
        traced = trace_rays(tree.charts[label], by_label[label], opts)
        for theta in by_label[label]:
            ray = traced[theta]
            if ray.status == TERMINATED_PRECRITICAL:
                raise ValueError(
                    f"ray {label}:{theta} hit an iterated critical preimage; "
                    "the pullback is not postcritically finite in the basins"
                )
            if ray.landed:
                rays.append(ray)
            else:
                dropped.append(f"{label}:{theta}")

    graph = build_ray_graph(rays, role=f"delta_{level}")
    inf_vid = next(
        (v for v, (p, _) in enumerate(graph.vertices) if p.is_infinite), None
    )
    if inf_vid is None:
        raise ValueError("no ray landed at infinity; the fixed-ray skeleton failed")
    keep_vs = graph.component_of(inf_vid)
    kept = [
        ray
        for i, ray in enumerate(graph.rays)
        if graph.incidence.get((i, LANDING)) in keep_vs
    ]
    out = build_ray_graph(kept, role=f"delta_{level}", refine=False)
    if dropped:
        out.notes.append("unlanded rays dropped: " + ", ".join(dropped))
    n_off = len(graph.rays) - len(kept)
    if n_off:
        out.notes.append(f"{n_off} rays outside the component of infinity")
    return out


# ---------------------------------------------------------------------------
# Cut angles


@dataclass(frozen=True)
class CutAngleSet:
    """Angles whose opposite-pair rays co-land, up to a denominator bound.

    ``members`` holds the confirmed angles theta (ray of theta in the first
    basin, of 1 - theta in the second); ``indeterminate`` holds angles whose
    co-landing could not be resolved either way.  ``alpha_estimate`` is the
    smallest member under the identification of 0 with 1.
    """

    q_max: int
    members: FrozenSet[Fraction]
    alpha_estimate: Fraction
    indeterminate: FrozenSet[Fraction]
    distances: Mapping[Fraction, float] = field(default_factory=dict)

    def __contains__(self, theta) -> bool:
        return normalize_angle(Fraction(theta)) in self.members


def farey_angles(q_max: int) -> List[Fraction]:
    """All reduced rationals in [0, 1) with denominator at most q_max."""
    out = [
        Fraction(p, q)
        for q in range(1, q_max + 1)
        for p in range(q)
        if math.gcd(p, q) == 1
    ]
    return sorted(out)


def _resolve_pair(
    m: MapRep,
    basin_pair: Tuple[object, object],
    charts: Optional[Dict[str, BottcherChart]],
) -> Tuple[BottcherChart, BottcherChart]:
    def pick(item, idx):
        if isinstance(item, BottcherChart):
            return item
        i = int(item)
        label = f"b{i}"
        if charts is not None and label in charts:
            return charts[label]
        centers = _root_centers(m)
        return chart_at_root(m, centers[i], label=label)

    a, b = basin_pair
    return pick(a, 0), pick(b, 1)


def cut_angles(
    m: MapRep,
    basin_pair: Tuple[object, object],
    q_max: int,
    charts: Optional[Dict[str, BottcherChart]] = None,
    coland_tol: float = 1e-6,
) -> CutAngleSet:
    """Scan all reduced angles with denominator <= q_max for co-landing.

    The ray of angle theta in the first basin is tested against the ray of
    angle 1 - theta in the second.  Raw landing estimates farther apart than
    a safe prefilter are rejected outright; near pairs are refined and
    certified, and unresolved cases are reported as indeterminate.
    """
    c1, c2 = _resolve_pair(m, basin_pair, charts)
    half = Fraction(1, 2)
    ha, hb = trace_ray(c1, half), trace_ray(c2, half)
    pre = coland(ha, hb, coland_tol) if (ha.landed and hb.landed) else None
    if pre is None or pre.verdict is not True:
        gap = "unlanded" if pre is None else f"gap {pre.distance:.3g}"
        raise ValueError(
            "basins do not share a boundary pole; their angle-1/2 rays "
            f"fail to co-land ({gap})"
        )

    angles = farey_angles(q_max)
    fast = TraceOptions(store_samples=False, refine=False)
    batch1 = trace_rays(c1, angles, fast)
    batch2 = trace_rays(c2, angles, fast)

    members = set()
    indet = set()
    dists: Dict[Fraction, float] = {}
    for t in angles:
        ra = batch1[t]
        rb = batch2[normalize_angle(-t)]
        if not (ra.landed and rb.landed):
            indet.add(t)
            continue
        if sphere_dist(ra.approx, rb.approx) > PREFILTER_TOL:
            continue
        if ra.ensure_certificate() is None or rb.ensure_certificate() is None:
            indet.add(t)
            continue
        res = coland(ra, rb, coland_tol)
        if res.verdict is True:
            members.add(t)
            dists[t] = res.distance
        elif res.verdict is None:
            indet.add(t)
    alpha = min((t for t in members if t > 0), default=Fraction(1))
    return CutAngleSet(
        q_max=q_max,
        members=frozenset(members),
        alpha_estimate=alpha,
        indeterminate=frozenset(indet),
        distances=dists,
    )


def shared_pole_pairs(
    m: MapRep,
    charts: Optional[Dict[str, BottcherChart]] = None,
    coland_tol: float = 1e-6,
) -> List[Tuple[str, str, SpherePoint]]:
    """Basin pairs whose angle-1/2 rays co-land, with the shared point."""
    charts = charts or immediate_charts(m)
    half = Fraction(1, 2)
    rays = {
        lab: trace_ray(charts[lab], half) for lab in sorted(charts)
    }
    out = []
    labs = sorted(charts)
    for i, la in enumerate(labs):
        for lb in labs[i + 1 :]:
            ra, rb = rays[la], rays[lb]
            if not (ra.landed and rb.landed):
                continue
            res = coland(ra, rb, coland_tol)
            if res.verdict is True:
                out.append((la, lb, res.point))
    return out


# ---------------------------------------------------------------------------
# The cubic curves gamma(0,1/2), L, C and the invariant graph G


def _cubic_setting(
    m: MapRep,
    pair: Optional[Tuple[object, object]],
    charts: Optional[Dict[str, BottcherChart]],
) -> Tuple[BottcherChart, BottcherChart, BottcherChart, Dict[str, BottcherChart]]:
    """Resolve (basin 1, basin 2, basin 3) with 1 and 2 sharing a pole."""
    if m.degree != 3:
        raise ValueError("the ten-ray curve constructions require a cubic map")
    charts = charts or immediate_charts(m)
    if len(charts) != 3:
        raise ValueError("three immediate basins are required")
    if pair is not None:
        c1, c2 = _resolve_pair(m, pair, charts)
        rest = [c for c in charts.values() if c.label not in (c1.label, c2.label)]
        if len(rest) != 1:
            raise ValueError("basin pair does not leave a unique third basin")
        return c1, c2, rest[0], charts
    pairs = shared_pole_pairs(m, charts)
    if len(pairs) != 1:
        raise ValueError(
            f"expected exactly one basin pair sharing a pole, found {len(pairs)}"
        )
    la, lb, _ = pairs[0]
    (lc,) = [lab for lab in charts if lab not in (la, lb)]
    return charts[la], charts[lb], charts[lc], charts


def _free_critical_points(m: MapRep) -> List[SpherePoint]:
    roots = _root_centers(m)
    out = []
    for p, _ in critical_points(m):
        if p.is_infinite:
            continue
        if all(abs(p.value - r) > 1e-8 * (1 + abs(r)) for r in roots):
            out.append(p)
    return out


class _ThetaOracle:
    """Memoized co-landing tests between one basin pair."""

    def __init__(self, c1: BottcherChart, c2: BottcherChart, tol: float = 1e-6):
        self.c1, self.c2, self.tol = c1, c2, tol
        self._cache: Dict[Fraction, Optional[bool]] = {}

    def is_cut(self, theta: Fraction) -> Optional[bool]:
        theta = normalize_angle(theta)
        if theta not in self._cache:
            ra = trace_ray(self.c1, theta)
            rb = trace_ray(self.c2, normalize_angle(-theta))
            if not (ra.landed and rb.landed):
                self._cache[theta] = None
            else:
                self._cache[theta] = coland(ra, rb, self.tol).verdict
        return self._cache[theta]


def _eta_exponent(theta: Fraction) -> Optional[int]:
    """Smallest k >= 1 with 2^k theta mod 1 in (1/2, 1)."""
    pre, per, orbit = angle_orbit(theta, 2)
    for k in range(1, pre + per + 1):
        t = normalize_angle(theta * 2**k)
        if Fraction(1, 2) < t < 1:
            return k
    return None


def _check_curve_preconditions(
    m: MapRep,
    c1: BottcherChart,
    c2: BottcherChart,
    theta: Fraction,
    k: Optional[int],
    oracle: Optional[_ThetaOracle] = None,
    guard: float = DELTA_S,
) -> int:
    """Validate conditions (i)-(iii) on theta; returns the exponent for eta."""
    theta = normalize_angle(theta)
    if not 0 < theta < Fraction(1, 2):
        raise CurvePrecondition("i", f"theta={theta} is not in (0, 1/2)")
    oracle = oracle or _ThetaOracle(c1, c2)
    in_theta = oracle.is_cut(theta)
    doubled = oracle.is_cut(2 * theta)
    if in_theta is not False or doubled is not True:
        raise CurvePrecondition(
            "i",
            f"need theta not a cut angle and 2*theta a cut angle; "
            f"got {in_theta} and {doubled} for theta={theta}",
        )
    kk = _eta_exponent(theta)
    if kk is None:
        raise CurvePrecondition(
            "ii", f"no k >= 1 puts 2^k*{theta} in (1/2, 1)"
        )
    if k is not None:
        eta = normalize_angle(theta * 2**k)
        if not Fraction(1, 2) < eta < 1:
            raise CurvePrecondition(
                "ii", f"eta = 2^{k}*{theta} = {eta} is not in (1/2, 1)"
            )
        kk = k
    ray = trace_ray(c1, theta)
    if ray.ensure_certificate() is None:
        raise CurvePrecondition("iii", f"landing of the theta ray unresolved: {ray.note}")
    pre, per, _ = angle_orbit(theta, c1.local_degree)
    z = ray.landing_point
    avoid = _free_critical_points(m) + [INF]
    for _ in range(pre + per + 1):
        for c in avoid:
            if sphere_dist(z, c) < guard:
                raise CurvePrecondition(
                    "iii",
                    f"the orbit of the landing point of the theta ray passes "
                    f"within {guard:g} of {c}",
                )
        z = advance(m, z, 1)
    return kk


def _nonfixed_preimage(m: MapRep, center: complex) -> List[complex]:
    out: List[complex] = []
    for p in m.preimages(center):
        if p.is_infinite:
            continue
        z = p.value
        if abs(z - center) < 1e-8 * (1 + abs(center)):
            continue
        if all(abs(z - c) > 1e-8 * (1 + abs(c)) for c in out):
            out.append(z)
    return sorted(out, key=lambda t: (t.real, t.imag))


def _first_level_chart(m: MapRep, chart: BottcherChart) -> BottcherChart:
    """The degree-one preimage component of an immediate basin."""
    others = _nonfixed_preimage(m, chart.center)
    if len(others) != 1:
        raise ValueError(
            f"expected one non-fixed preimage of basin {chart.label}, "
            f"found {len(others)}"
        )
    return chart_at_preimage(m, chart, others[0], label=f"{chart.label}p1")


def _second_level_chart(
    m: MapRep,
    level1: BottcherChart,
    anchor: InternalRay,
    coland_tol: float = 1e-6,
) -> BottcherChart:
    """The preimage component of level1 whose zero ray co-lands with anchor.

    This is the landing-point adjacency rule: candidate components are found
    by pulling back the parent center, and the one adjacent to the anchor
    ray's landing point is selected by a certified co-landing test.
    """
    if anchor.ensure_certificate() is None:
        raise ValueError(f"anchor ray landing unresolved: {anchor.note}")
    picked = []
    for j, z in enumerate(_nonfixed_preimage(m, level1.center)):
        cand = chart_at_preimage(m, level1, z, label=f"{level1.label[:-2]}p2.{j}")
        ray = trace_ray(cand, Fraction(0))
        if not ray.landed:
            continue
        if coland(ray, anchor, coland_tol).verdict is True:
            picked.append(cand)
    if len(picked) != 1:
        raise ValueError(
            f"landing-point adjacency selected {len(picked)} candidate "
            f"components below {level1.label}; expected exactly one"
        )
    chart = picked[0]
    chart.label = chart.label.split(".")[0]
    return chart


def _trace_specs(
    specs: Sequence[Tuple[BottcherChart, Fraction]],
    opts: Optional[TraceOptions] = None,
) -> List[InternalRay]:
    """Trace (chart, angle) requests grouped per chart, preserving order."""
    by_chart: Dict[int, Tuple[BottcherChart, List[Fraction]]] = {}
    for chart, theta in specs:
        by_chart.setdefault(id(chart), (chart, []))[1].append(normalize_angle(theta))
    traced: Dict[Tuple[int, Fraction], InternalRay] = {}
    for chart, angles in by_chart.values():
        got = trace_rays(chart, angles, opts)
        for t, ray in got.items():
            traced[(id(chart), t)] = ray
    return [traced[(id(c), normalize_angle(t))] for c, t in specs]


def build_curve_gamma(
    m: MapRep,
    pair: Optional[Tuple[object, object]] = None,
    charts: Optional[Dict[str, BottcherChart]] = None,
) -> RayGraph:
    """The closed curve of the 0- and 1/2-rays of two pole-sharing basins."""
    if pair is None:
        pairs = shared_pole_pairs(m, charts)
        if not pairs:
            raise ValueError("no basin pair shares a boundary pole")
        charts = charts or immediate_charts(m)
        c1, c2 = charts[pairs[0][0]], charts[pairs[0][1]]
    else:
        c1, c2 = _resolve_pair(m, pair, charts)
    zero, half = Fraction(0), Fraction(1, 2)
    rays = _trace_specs([(c1, zero), (c1, half), (c2, zero), (c2, half)])
    graph = build_ray_graph(rays, role="gamma_curve")
    if not graph.is_cycle():
        raise ValueError(
            "gamma(0,1/2) did not close into a cycle; the basins do not share "
            "a boundary pole"
        )
    return graph


def build_curve_L(
    m: MapRep,
    theta: Fraction,
    pair: Optional[Tuple[object, object]] = None,
    charts: Optional[Dict[str, BottcherChart]] = None,
) -> RayGraph:
    """The connected ten-ray partition graph for a valid angle theta."""
    c1, c2, c3, charts = _cubic_setting(m, pair, charts)
    theta = normalize_angle(Fraction(theta))
    _check_curve_preconditions(m, c1, c2, theta, None)
    c1p1 = _first_level_chart(m, c1)
    c2p1 = _first_level_chart(m, c2)
    zero, half = Fraction(0), Fraction(1, 2)
    specs = [
        (c3, zero),
        (c3, half),
        (c1, zero),
        (c1, theta),
        (c2, zero),
        (c2, 1 - theta),
        (c2p1, 1 - 2 * theta),
        (c2p1, zero),
        (c1p1, zero),
        (c1p1, 2 * theta),
    ]
    graph = build_ray_graph(_trace_specs(specs), role="L_curve")
    if not graph.is_connected():
        raise ValueError("the ten-ray partition graph failed to connect")
    return graph


def build_curve_C(
    m: MapRep,
    theta: Fraction,
    k: int,
    pair: Optional[Tuple[object, object]] = None,
    charts: Optional[Dict[str, BottcherChart]] = None,
) -> RayGraph:
    """The Jordan curve of ten rays two pullback levels deep.

    theta must fail to be a cut angle while 2*theta is one, eta = 2^k theta
    must fall in (1/2, 1), and the orbit of the theta ray's landing point
    must avoid the free critical points and infinity; violations raise with
    the offending condition named.  The second-level components are selected
    by landing-point adjacency against the quarter rays of the third basin.
    """
    c1, c2, c3, charts = _cubic_setting(m, pair, charts)
    theta = normalize_angle(Fraction(theta))
    if k < 1:
        raise CurvePrecondition("ii", f"k must be >= 1, got {k}")
    _check_curve_preconditions(m, c1, c2, theta, k)
    eta = normalize_angle(theta * 2**k)

    c1p1 = _first_level_chart(m, c1)
    c2p1 = _first_level_chart(m, c2)
    quarter = trace_ray(c3, Fraction(1, 4))
    three_q = trace_ray(c3, Fraction(3, 4))
    c2p2 = _second_level_chart(m, c2p1, three_q)
    c1p2 = _second_level_chart(m, c1p1, quarter)

    zero = Fraction(0)
    specs = [
        (c3, Fraction(1, 4)),
        (c3, Fraction(3, 4)),
        (c2p2, zero),
        (c2p2, 1 - 2 * theta),
        (c1, theta / 2),
        (c1, eta),
        (c2, 1 - eta),
        (c2, 1 - theta / 2),
        (c1p2, 2 * theta),
        (c1p2, zero),
    ]
    graph = build_ray_graph(_trace_specs(specs), role="C_curve")
    if not graph.is_cycle():
        raise ValueError("the ten separating rays did not close into a Jordan cycle")
    return graph


def find_curve_c_angle(
    m: MapRep,
    pair: Optional[Tuple[object, object]] = None,
    charts: Optional[Dict[str, BottcherChart]] = None,
    q_max: int = 64,
    angle_set: Optional[CutAngleSet] = None,
) -> Tuple[Fraction, int]:
    """Search small-denominator angles for one meeting conditions (i)-(iii).

    One batched cut-angle scan answers condition (i) for every candidate at
    once; the doubling condition (ii) is exact arithmetic, and the orbit
    condition (iii) is checked only for the survivors.  Returns (theta, k);
    raises with the failure tally if no angle with denominator <= q_max
    qualifies.
    """
    c1, c2, c3, charts = _cubic_setting(m, pair, charts)
    if angle_set is None:
        angle_set = cut_angles(m, (c1, c2), q_max, charts=charts)
    failures = Counter()
    candidates = sorted(
        (t for t in farey_angles(q_max) if 0 < t < Fraction(1, 2)),
        key=lambda t: (t.denominator, t.numerator),
    )
    for theta in candidates:
        dbl = normalize_angle(2 * theta)
        if (
            theta in angle_set.members
            or theta in angle_set.indeterminate
            or dbl not in angle_set.members
        ):
            failures["i"] += 1
            continue
        try:
            k = _check_curve_preconditions(m, c1, c2, theta, None)
            return theta, k
        except CurvePrecondition as exc:
            failures[exc.condition] += 1
    raise ValueError(
        f"no angle with denominator <= {q_max} satisfies the curve "
        "preconditions; failures by condition: "
        + ", ".join(f"({k}) x{v}" for k, v in sorted(failures.items()))
    )


def build_graph_G(
    m: MapRep,
    theta: Fraction,
    k: int,
    pair: Optional[Tuple[object, object]] = None,
    charts: Optional[Dict[str, BottcherChart]] = None,
) -> RayGraph:
    """The forward-invariant union of the iterates of the separating curve.

    Angles double on immediate basins and pass through unchanged on chain
    components, so the closure is computed combinatorially before tracing.
    """
    curve = build_curve_C(m, theta, k, pair, charts)
    chart_of = {ray.chart.label: ray.chart for ray in curve.rays}
    specs = {(ray.chart.label, ray.angle) for ray in curve.rays}
    frontier = set(specs)
    while frontier:
        nxt = set()
        for label, angle in frontier:
            chart = chart_of[label]
            if chart.is_immediate:
                img = (label, normalize_angle(angle * chart.local_degree))
            else:
                parent = chart.parent
                chart_of.setdefault(parent.label, parent)
                img = (parent.label, angle)
            if img not in specs:
                nxt.add(img)
        specs |= nxt
        frontier = nxt
    ordered = sorted(specs, key=lambda s: (s[0], s[1]))
    rays = _trace_specs([(chart_of[lab], ang) for lab, ang in ordered])
    graph = build_ray_graph(rays, role="G_graph")
    if not graph.is_connected():
        raise ValueError("the curve iterates did not assemble into a connected graph")
    return graph


# ---------------------------------------------------------------------------
# Graph comparison


def graph_hausdorff(g1: RayGraph, g2: RayGraph, max_gap: float = DELTA_S) -> float:
    """Symmetric Hausdorff distance of the sampled clouds (chordal metric).

    Both clouds are densified to spacing <= max_gap, which also bounds the
    discretization error of the result.
    """
    a = g1.sample_cloud(max_gap)
    b = g2.sample_cloud(max_gap)
    return max(
        float(cKDTree(b).query(a)[0].max()), float(cKDTree(a).query(b)[0].max())
    )


def graph_hausdorff_directed(
    g1: RayGraph, g2: RayGraph, max_gap: float = DELTA_S
) -> float:
    """sup over g1's cloud of the distance to g2's cloud."""
    a = g1.sample_cloud(max_gap)
    b = g2.sample_cloud(max_gap)
    return float(cKDTree(b).query(a)[0].max())


def graph_min_distance(g: RayGraph, point, max_gap: float = DELTA_S) -> float:
    """Minimum chordal distance from the sampled graph to a point."""
    cloud = g.sample_cloud(max_gap)
    target = sphere_embed([point])
    return float(cKDTree(cloud).query(target)[0][0])


def cycle_polyline(g: RayGraph) -> np.ndarray:
    """Plane polyline walking a single-cycle graph once around."""
    if not g.is_cycle():
        raise ValueError("graph is not a single cycle")
    at_vertex: Dict[int, List[Tuple[int, str]]] = {}
    for (i, end), vid in g.incidence.items():
        at_vertex.setdefault(vid, []).append((i, end))

    def ray_points(i: int, start_end: str) -> List[complex]:
        ray = g.rays[i]
        run = [complex(ray.chart.center)]
        run.extend(s.as_complex() for s in ray.samples)
        end = ray.landing_point or ray.approx
        if end is not None:
            run.append(end.as_complex())
        if start_end == LANDING:
            run.reverse()
        return run

    path: List[complex] = []
    i, entry = 0, CENTER
    for _ in range(len(g.rays)):
        path.extend(ray_points(i, entry))
        out_vid = g.incidence[(i, LANDING if entry == CENTER else CENTER)]
        (j, f) = next(e for e in at_vertex[out_vid] if e[0] != i)
        i, entry = j, f
    return np.asarray([z for z in path if np.isfinite(z.real)], complex)


def winding_contains(g: RayGraph, point, delta: float = DELTA_S) -> Optional[bool]:
    """Is a point strictly inside the sampled cycle?  None when within delta
    of the curve (too close to call)."""
    curve = cycle_polyline(g)
    p = SpherePoint.of(point)
    gap = float(
        sphere_dist_arr(np.full(len(curve), p.as_complex()), curve).min()
    )
    if gap < delta:
        return None
    if p.is_infinite:
        return False
    return _winding_number(curve, p.value) != 0


def graph_iso(g1: RayGraph, g2: RayGraph) -> Optional[bool]:
    """Isomorphism of the tagged incidence structures.

    Rays are matched by their (component label, angle) tags; the graphs are
    isomorphic when the tag multisets agree and the partitions of ray ends
    into shared vertices agree.  Unlanded rays on either side make the
    verdict indeterminate (None).
    """
    for g in (g1, g2):
        if g.orphan_ends():
            return None

    def tag_partition(g: RayGraph) -> Optional[Counter]:
        tags = [g.ray_tag(i) for i in range(len(g.rays))]
        if len(set(tags)) != len(tags):
            raise ValueError("duplicate (component, angle) tags in a graph")
        groups: Dict[int, list] = {}
        for (i, end), vid in g.incidence.items():
            groups.setdefault(vid, []).append((tags[i], end))
        return Counter(frozenset(ends) for ends in groups.values())

    t1 = [g1.ray_tag(i) for i in range(len(g1.rays))]
    t2 = [g2.ray_tag(i) for i in range(len(g2.rays))]
    if Counter(t1) != Counter(t2):
        return False
    return tag_partition(g1) == tag_partition(g2)


# ---------------------------------------------------------------------------
# Separability of quartic maps


def _winding_number(curve: np.ndarray, p: complex) -> int:
    rel = curve - p
    args = np.angle(rel)
    diffs = np.diff(np.append(args, args[0]))
    diffs = (diffs + np.pi) % (2 * np.pi) - np.pi
    return int(round(diffs.sum() / (2 * np.pi)))


def _gamma_polyline(rays: Sequence[InternalRay]) -> np.ndarray:
    """Plane polyline of the closed curve: out ray i, in+out through the pole,
    back along ray j (orientation consistent for winding tests)."""
    ri0, ri5, rj5, rj0 = rays

    def pts(ray: InternalRay) -> List[complex]:
        run = [complex(ray.chart.center)]
        run.extend(s.as_complex() for s in ray.samples)
        end = ray.landing_point or ray.approx
        if end is not None and not end.is_infinite:
            run.append(end.as_complex())
        return run

    path = pts(ri0)[::-1] + pts(ri5) + pts(rj5)[::-1] + pts(rj0)
    return np.asarray([z for z in path if np.isfinite(z.real)], complex)


def separable_check(
    m: MapRep,
    charts: Optional[Dict[str, BottcherChart]] = None,
    delta: float = DELTA_S,
) -> Optional[bool]:
    """Does some pole-sharing basin pair's closed curve separate the poles?

    True when a pair's curve (angles 0 and 1/2 through the shared pole and
    infinity) has at least one pole strictly inside each complementary
    component, judged by winding numbers on the sampled curve.  Poles within
    ``delta`` of the curve make the verdict indeterminate (None).
    """
    if m.degree != 4:
        raise ValueError("separability is defined for quartic maps")
    charts = charts or immediate_charts(m)
    if any(c.local_degree != 2 for c in charts.values()):
        raise ValueError("each immediate basin must have degree 2")
    finite_poles = [p for p, _ in poles(m) if not p.is_infinite]

    zero, half = Fraction(0), Fraction(1, 2)
    indeterminate = False
    any_shared = False
    labs = sorted(charts)
    for i, la in enumerate(labs):
        for lb in labs[i + 1 :]:
            ci, cj = charts[la], charts[lb]
            rays = _trace_specs([(ci, zero), (ci, half), (cj, zero), (cj, half)])
            for ray in rays:
                ray.ensure_certificate()
            if not (rays[1].landed and rays[3].landed):
                indeterminate = True
                continue
            shared = coland(rays[1], rays[3])
            if shared.verdict is None:
                indeterminate = True
                continue
            if shared.verdict is False:
                continue
            any_shared = True
            curve = _gamma_polyline(rays)
            inside = outside = 0
            near = False
            for p in finite_poles:
                if sphere_dist(p, shared.point) < VERTEX_TOL:
                    continue
                gap = float(
                    sphere_dist_arr(
                        np.full(len(curve), p.as_complex()), curve
                    ).min()
                )
                if gap < delta:
                    near = True
                    continue
                if _winding_number(curve, p.value) != 0:
                    inside += 1
                else:
                    outside += 1
            if inside > 0 and outside > 0:
                return True
            if near:
                indeterminate = True
    if not any_shared:
        return None
    return None if indeterminate else False


# ---------------------------------------------------------------------------
# Serialization


def graph_to_dict(g: RayGraph) -> dict:
    """JSON-ready summary: role, ray tags, vertices, incidence."""
    return {
        "role": g.role,
        "rays": [
            {
                "id": i,
                "component": g.rays[i].chart.label,
                "angle": [g.rays[i].angle.numerator, g.rays[i].angle.denominator],
                "status": g.rays[i].status,
            }
            for i in range(len(g.rays))
        ],
        "vertices": [
            {
                "point": None if p.is_infinite else [p.value.real, p.value.imag],
                "infinite": p.is_infinite,
                "kind": kind,
            }
            for p, kind in g.vertices
        ],
        "incidence": [
            [[i, end], vid] for (i, end), vid in sorted(g.incidence.items())
        ],
        "notes": list(g.notes),
    }


def graph_to_dot(g: RayGraph) -> str:
    """DOT rendering of the combinatorial graph (vertices and ray edges)."""
    lines = [f'graph "{g.role}" {{']
    for vid, (p, kind) in enumerate(g.vertices):
        where = "inf" if p.is_infinite else f"{p.value.real:.4g}{p.value.imag:+.4g}i"
        lines.append(f'  v{vid} [label="{kind} {where}"];')
    for i in range(len(g.rays)):
        a = g.incidence.get((i, CENTER))
        b = g.incidence.get((i, LANDING))
        lab, ang = g.ray_tag(i)
        if a is not None and b is not None:
            lines.append(f'  v{a} -- v{b} [label="{lab}:{ang}"];')
        else:
            lines.append(f"  // orphan ray {lab}:{ang}")
    lines.append("}")
    return "\n".join(lines)
