"""Hyperbolic-type classification and raster rendering for Newton maps.

A quartic Newton map has six critical points counted with multiplicity:
the four roots and two *additional* critical points, the zeros of the
second derivative of the defining polynomial.  When every critical orbit
converges to an attracting cycle, the map is classified by where the two
additional critical points sit:

==========  ==========================================================
``A``       both in one component of the immediate basin of a free cycle
``B``       same free cycle, two different immediate components
``C``       one immediate, the other in the same cycle's basin but not
            in an immediate component
``D``       immediate basins of two distinct free cycles
``IE``      some additional critical point in the immediate basin of a
            root
``FE1``     one in a root basin away from the immediate component, the
            other in a free cycle's immediate basin
``FE2``     both in root basins away from the immediate components
==========  ==========================================================

A *free* cycle is an attracting cycle of period at least two (finite
fixed points of a Newton map are the roots).  Exact component membership
is not decidable numerically, so every operation here reports
``unresolved`` when a budget runs out or a critical point sits within a
pixel of a component boundary.

This module provides orbit classification (:func:`detect_cycle`), basin
label grids with component ids (:func:`label_components`), whole-map
classification (:func:`classify_type`), and deterministic raster renders
of dynamical and parameter planes.  Images are written as binary PPM
always and PNG when Pillow is importable; label grids use a compact
binary layout with a JSON header.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import ndimage

from .maps import MapRep, critical_points, fixed_points, refine_cycle
from .sphere import SpherePoint
from . import _kernels

__all__ = [
    "TypeLabel",
    "CycleRecord",
    "RootTarget",
    "ClassifyResult",
    "LabelGrid",
    "detect_cycle",
    "label_components",
    "classify_type",
    "per2_type_grid",
    "render_dynamical",
    "render_parameter",
    "write_ppm",
    "write_png",
    "write_image",
    "write_label_grid",
    "read_label_grid",
    "write_type_grid",
    "read_type_grid",
    "DEFAULT_PER2_REGION",
    "TYPE_CODES",
    "MASKED_CODE",
]

SUPERATTRACTING = "superattracting"
ATTRACTING = "attracting"
INDETERMINATE = "indeterminate"

#: Parameter-plane viewport containing all five large type regions of the
#: period-two slice (located by a coarse scan; see per2_type_grid).
DEFAULT_PER2_REGION = (-0.75, 1.75, -1.25, 1.25)

#: Magnitude cap for plane orbits; infinity is repelling, so capped
#: iterates flow back into the bounded region.
_PLANE_CAP = 1e12

_PHASE_STRIDE = 64  # labels assume cycle periods below this


class TypeLabel(str, Enum):
    """Hyperbolic type of a quartic Newton map."""

    A = "A"
    B = "B"
    C = "C"
    D = "D"
    IE = "IE"
    FE1 = "FE1"
    FE2 = "FE2"
    UNRESOLVED = "unresolved"


TYPE_CODES: Dict[TypeLabel, int] = {
    TypeLabel.A: _kernels.A,
    TypeLabel.B: _kernels.B,
    TypeLabel.C: _kernels.C,
    TypeLabel.D: _kernels.D,
    TypeLabel.IE: _kernels.IE,
    TypeLabel.FE1: _kernels.FE1,
    TypeLabel.FE2: _kernels.FE2,
    TypeLabel.UNRESOLVED: _kernels.UNRES,
}
CODE_LABELS: Dict[int, TypeLabel] = {v: k for k, v in TYPE_CODES.items()}
#: Grid code for degenerate parameters (collided roots); not a TypeLabel.
MASKED_CODE = _kernels.MASKED

#: Deterministic palettes: root basins by root index, types by code.
ROOT_PALETTE: Tuple[Tuple[int, int, int], ...] = (
    (66, 135, 245),
    (235, 110, 75),
    (90, 200, 120),
    (230, 200, 70),
    (170, 110, 220),
    (90, 210, 210),
    (240, 140, 200),
    (150, 150, 150),
)
TYPE_PALETTE: Dict[int, Tuple[int, int, int]] = {
    _kernels.A: (60, 180, 90),
    _kernels.B: (60, 110, 235),
    _kernels.C: (80, 220, 220),
    _kernels.D: (225, 70, 225),
    _kernels.IE: (240, 150, 50),
    _kernels.FE1: (240, 220, 80),
    _kernels.FE2: (220, 60, 60),
    _kernels.UNRES: (0, 0, 0),
    _kernels.MASKED: (70, 70, 70),
}


@dataclass(frozen=True)
class CycleRecord:
    """An attracting cycle located by orbit iteration.

    ``points`` starts at the cycle point with lexicographically smallest
    (re, im); ``kind`` is superattracting, attracting, or indeterminate
    (budget exhausted, in which case the other fields are empty).
    """

    points: Tuple[SpherePoint, ...]
    period: int
    multiplier: complex
    kind: str

    def matches(self, other: "CycleRecord", tol: float = 1e-6) -> bool:
        """Whether both records describe the same cycle."""
        if self.period != other.period or not self.points:
            return False
        scale = 1.0 + max(abs(p.value) for p in self.points if not p.is_infinite)
        mine = [p.value for p in self.points]
        for q in other.points:
            if q.is_infinite or min(abs(q.value - z) for z in mine) > tol * scale:
                return False
        return True


@dataclass(frozen=True)
class RootTarget:
    """Verdict for an orbit absorbed by a superattracting root."""

    index: int
    point: SpherePoint


def _sorted_roots(m: MapRep) -> List[complex]:
    pts = [p.value for p, _ in fixed_points(m) if not p.is_infinite]
    return sorted(pts, key=lambda z: (z.real, z.imag))


def _absorption_radii(roots: Sequence[complex], crits: Sequence[complex]) -> np.ndarray:
    """Conservative disk radii around each root: inside its disk an orbit
    is committed to that root (the disk avoids other roots and the free
    critical points)."""
    out = np.empty(len(roots))
    for k, r in enumerate(roots):
        lim = min(
            (abs(r - o) for i, o in enumerate(roots) if i != k), default=1.0
        )
        for c in crits:
            d = abs(r - c)
            if d > 1e-12:
                lim = min(lim, 2.0 * d)
        out[k] = max(0.25 * lim, 1e-12)
    return out


def _cycle_radii(cycle: CycleRecord, roots: Sequence[complex]) -> np.ndarray:
    pts = [p.value for p in cycle.points]
    out = np.empty(len(pts))
    for i, w in enumerate(pts):
        lim = min((abs(w - r) for r in roots), default=1.0)
        lim = min(
            lim, min((abs(w - o) for j, o in enumerate(pts) if j != i), default=1.0)
        )
        out[i] = max(0.2 * min(lim, 1.0), 1e-12)
    return out


def _step_array(m: MapRep, z: np.ndarray) -> np.ndarray:
    """Vectorized map application on plane points with pole/overflow guards."""
    den = npoly.polyval(z, m.denom.coeffs)
    den = np.where(den == 0, 1e-300 + 0.0j, den)
    out = npoly.polyval(z, m.numer.coeffs) / den
    mag = np.abs(out)
    bad = ~np.isfinite(out)
    out = np.where(bad, _PLANE_CAP + 0.0j, out)
    big = mag > _PLANE_CAP
    with np.errstate(invalid="ignore"):
        out = np.where(big & ~bad, out * (_PLANE_CAP / np.where(big, mag, 1.0)), out)
    return out


def detect_cycle(
    m: MapRep, seed: Union[SpherePoint, complex], budget: int = 400
) -> Union[CycleRecord, RootTarget]:
    """Classify the forward orbit of ``seed``.

    Returns a :class:`RootTarget` when the orbit is absorbed by a root
    and an attracting :class:`CycleRecord` when it settles on a free
    cycle.  Budget exhaustion (or a seed whose orbit never stabilizes,
    such as one stuck on repelling sets) yields an indeterminate record.
    """
    if isinstance(seed, SpherePoint):
        if seed.is_infinite:
            return CycleRecord((), 0, complex("nan"), INDETERMINATE)
        z = seed.value
    else:
        z = complex(seed)
    roots = _sorted_roots(m)
    crits = [p.value for p, _ in critical_points(m) if not p.is_infinite]
    dr = _absorption_radii(roots, crits)
    ringlen = 64
    ring: List[complex] = [0j] * ringlen
    for n in range(budget + 1):
        for k, r in enumerate(roots):
            if abs(z - r) < dr[k]:
                w = z
                prev = abs(w - r)
                ok = True
                for _ in range(3):
                    w = _plane_step(m, w)
                    d = abs(w - r)
                    if d > 0.7 * prev + 1e-300:
                        ok = False
                        break
                    prev = d
                if ok:
                    return RootTarget(k, SpherePoint(r))
        if n >= 12:
            scale = 1.0 + abs(z)
            qmax = min(ringlen, n)
            for q in range(2, qmax + 1):
                cand = ring[(n - q) % ringlen]
                if abs(z - cand) < 1e-6 * scale:
                    rec = _confirm_cycle(m, z, q, roots)
                    if rec is not None:
                        return rec
        ring[n % ringlen] = z
        z = _plane_step(m, z)
    return CycleRecord((), 0, complex("nan"), INDETERMINATE)


def _plane_step(m: MapRep, z: complex) -> complex:
    den = complex(npoly.polyval(z, m.denom.coeffs))
    if den == 0:
        den = 1e-300 + 0j
    w = complex(npoly.polyval(z, m.numer.coeffs)) / den
    a = abs(w)
    if not np.isfinite(a) or a > _PLANE_CAP:
        if not np.isfinite(a):
            return complex(_PLANE_CAP)
        return w * (_PLANE_CAP / a)
    return w


def _confirm_cycle(
    m: MapRep, z: complex, q: int, roots: Sequence[complex]
) -> Optional[CycleRecord]:
    """Validate a recurrence candidate as an attracting cycle of minimal
    period and polish it with the cycle refiner."""
    from .families import _cycle_multiplier

    scale = 1.0 + abs(z)
    u = z
    for _ in range(q):
        u = _plane_step(m, u)
    d1 = abs(u - z)
    v = u
    for _ in range(q):
        v = _plane_step(m, v)
    d2 = abs(v - u)
    if d2 > 0.7 * d1 + 1e-300 or d2 > 1e-4 * scale:
        return None
    period = q
    for p in range(1, q):
        if q % p == 0:
            w = z
            for _ in range(p):
                w = _plane_step(m, w)
            if abs(w - z) < 1e-5 * scale:
                period = p
                break
    if period == 1:
        return None  # fixed points of a Newton map are roots, handled upstream
    try:
        z0 = refine_cycle(m, v, period)
    except (ValueError, ArithmeticError):
        return None
    pts: List[SpherePoint] = []
    w = z0
    for _ in range(period):
        pts.append(SpherePoint(w))
        nxt = m(SpherePoint(w))
        if nxt.is_infinite:
            return None
        w = nxt.value
    if abs(w - z0) > 1e-6 * (1.0 + abs(z0)):
        return None
    lam = _cycle_multiplier(m, tuple(pts))
    if not np.isfinite(abs(lam)) or abs(lam) >= 1.0 - 1e-9:
        return None
    for pt in pts:
        for r in roots:
            if abs(pt.value - r) < 1e-8 * (1.0 + abs(r)):
                return None
    start = min(
        range(period),
        key=lambda i: (pts[i].value.real, pts[i].value.imag),
    )
    ordered = tuple(pts[(start + i) % period] for i in range(period))
    kind = SUPERATTRACTING if abs(lam) < 1e-6 else ATTRACTING
    return CycleRecord(ordered, period, complex(lam), kind)


@dataclass
class LabelGrid:
    """Per-pixel basin labels for a rectangular plane region.

    ``target`` holds -1 (unresolved), a root index, or
    ``len(roots) + j`` for the j-th free cycle.  ``phase`` is the orbit
    entry index modulo the cycle period (0 for roots); ``component`` is
    a deterministic 4-adjacency component id over pixels sharing one
    (target, phase) pair, scanned row-major.  ``steps`` counts the
    iterations to absorption.
    """

    region: Tuple[float, float, float, float]
    nx: int
    ny: int
    roots: Tuple[complex, ...]
    cycles: Tuple[CycleRecord, ...]
    target: np.ndarray
    phase: np.ndarray
    component: np.ndarray
    steps: np.ndarray

    def pixel_of(self, z: complex) -> Optional[Tuple[int, int]]:
        """Grid indices (row, col) containing ``z``, or None if outside."""
        x0, x1, y0, y1 = self.region
        col = int(round((z.real - x0) / (x1 - x0) * (self.nx - 1)))
        row = int(round((z.imag - y0) / (y1 - y0) * (self.ny - 1)))
        if 0 <= row < self.ny and 0 <= col < self.nx:
            return row, col
        return None

    def label_at(self, z: complex) -> Optional[Tuple[int, int, int]]:
        """(target, phase, component) at the pixel containing ``z``."""
        px = self.pixel_of(z)
        if px is None:
            return None
        r, c = px
        t = int(self.target[r, c])
        if t < 0:
            return None
        return t, int(self.phase[r, c]), int(self.component[r, c])

    def immediate_component(self, target: int, phase: int) -> Optional[int]:
        """Component id of the immediate component for a (target, phase).

        The immediate component is the one containing the target point
        itself: the root for root targets, the cycle point indexed by
        ``phase`` for cycle targets (a pixel entering at the cycle point
        has entry step 0, so its phase equals the point index).
        """
        if target < len(self.roots):
            anchor = self.roots[target]
        else:
            cyc = self.cycles[target - len(self.roots)]
            if phase >= cyc.period or cyc.points[phase].is_infinite:
                return None
            anchor = cyc.points[phase].value
        lab = self.label_at(anchor)
        if lab is None or lab[0] != target or lab[1] != phase:
            return None
        return lab[2]

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {"unresolved": int((self.target < 0).sum())}
        for k in range(len(self.roots)):
            out[f"root{k}"] = int((self.target == k).sum())
        for j in range(len(self.cycles)):
            out[f"cycle{j}"] = int((self.target == len(self.roots) + j).sum())
        return out


def label_components(
    m: MapRep,
    region: Tuple[float, float, float, float],
    resolution: Union[int, Tuple[int, int]] = 256,
    budget: int = 400,
    max_cycles: int = 16,
) -> LabelGrid:
    """Label every pixel of ``region`` with its basin, phase, and component.

    Orbit iteration is vectorized over the grid; free cycles are
    discovered lazily by probing the first (row-major) pixel that the
    known targets fail to absorb, which keeps the discovery order and
    hence the cycle indexing deterministic.  Components are connected
    sets of equal (target, phase) under 4-adjacency.
    """
    if isinstance(resolution, int):
        nx = ny = resolution
    else:
        nx, ny = resolution
    x0, x1, y0, y1 = region
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    grid = (xs[None, :] + 1j * ys[:, None]).reshape(-1).astype(np.complex128)

    roots = _sorted_roots(m)
    crits = [p.value for p, _ in critical_points(m) if not p.is_infinite]
    dr = _absorption_radii(roots, crits)

    size = grid.size
    target = np.full(size, -1, np.int16)
    phase = np.full(size, -1, np.int16)
    steps = np.zeros(size, np.int32)

    cycles: List[CycleRecord] = []
    cyc_pts: List[np.ndarray] = []
    cyc_rad: List[np.ndarray] = []

    live = np.arange(size)
    cur = grid.copy()
    n_done = 0
    probes = 0
    while live.size and probes <= 4 * max_cycles:
        for local_n in range(budget + 1):
            n = n_done + local_n
            absorbed = np.zeros(cur.size, bool)
            for k, r in enumerate(roots):
                hit = (~absorbed) & (np.abs(cur - r) < dr[k])
                if hit.any():
                    idx = live[hit]
                    target[idx] = k
                    phase[idx] = 0
                    steps[idx] = n
                    absorbed |= hit
            for j, pts in enumerate(cyc_pts):
                q = cycles[j].period
                for i, w in enumerate(pts):
                    hit = (~absorbed) & (np.abs(cur - w) < cyc_rad[j][i])
                    if hit.any():
                        idx = live[hit]
                        target[idx] = len(roots) + j
                        phase[idx] = (i - n) % q
                        steps[idx] = n
                        absorbed |= hit
            if absorbed.any():
                keep = ~absorbed
                live = live[keep]
                cur = cur[keep]
            if not live.size:
                break
            cur = _step_array(m, cur)
        n_done += budget + 1
        if not live.size:
            break
        probes += 1
        verdict = detect_cycle(m, complex(cur[0]), budget)
        if isinstance(verdict, CycleRecord) and verdict.kind != INDETERMINATE:
            known = any(verdict.matches(c) for c in cycles)
            if not known and len(cycles) < max_cycles:
                cycles.append(verdict)
                cyc_pts.append(np.array([p.value for p in verdict.points]))
                cyc_rad.append(_cycle_radii(verdict, roots))
                continue
        # the probe pixel resists every known target: mark and drop it
        live = live[1:]
        cur = cur[1:]

    target = target.reshape(ny, nx)
    phase = phase.reshape(ny, nx)
    steps = steps.reshape(ny, nx)
    component = _flood_components(target, phase)
    return LabelGrid(
        region=(x0, x1, y0, y1),
        nx=nx,
        ny=ny,
        roots=tuple(roots),
        cycles=tuple(cycles),
        target=target,
        phase=phase,
        component=component,
        steps=steps,
    )


def _flood_components(target: np.ndarray, phase: np.ndarray) -> np.ndarray:
    """Deterministic 4-adjacency component ids over (target, phase) codes."""
    component = np.full(target.shape, -1, np.int32)
    codes = target.astype(np.int64) * _PHASE_STRIDE + phase
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], bool)
    offset = 0
    for code in np.unique(codes[target >= 0]):
        mask = codes == code
        labels, count = ndimage.label(mask, structure=structure)
        component[mask] = labels[mask] + offset - 1
        offset += count
    return component


@dataclass(frozen=True)
class ClassifyResult:
    """Outcome of a whole-map classification."""

    label: TypeLabel
    criticals: Tuple[complex, ...]
    targets: Tuple[Union[CycleRecord, RootTarget], ...]
    grid: Optional[LabelGrid]
    detail: str = ""

    def to_dict(self) -> dict:
        tgts = []
        for t in self.targets:
            if isinstance(t, RootTarget):
                tgts.append({"kind": "root", "index": t.index})
            else:
                tgts.append(
                    {
                        "kind": t.kind,
                        "period": t.period,
                        "multiplier": [t.multiplier.real, t.multiplier.imag]
                        if t.points
                        else None,
                    }
                )
        return {
            "label": self.label.value,
            "criticals": [[c.real, c.imag] for c in self.criticals],
            "targets": tgts,
            "detail": self.detail,
        }


def _free_criticals(m: MapRep) -> List[complex]:
    roots = _sorted_roots(m)
    out: List[complex] = []
    for p, order in critical_points(m):
        if p.is_infinite:
            continue
        if any(abs(p.value - r) < 1e-8 * (1.0 + abs(r)) for r in roots):
            continue
        out.extend([p.value] * order)
    return sorted(out, key=lambda z: (z.real, z.imag))


def _membership(
    grid: LabelGrid, z: complex
) -> Optional[Tuple[int, int, int, bool]]:
    """(target, phase, component, ambiguous) for the pixel holding ``z``.

    A membership is ambiguous when any 8-neighbour pixel carries a
    different label, i.e. the point sits within one pixel of a component
    boundary.
    """
    px = grid.pixel_of(z)
    if px is None:
        return None
    r, c = px
    t = int(grid.target[r, c])
    if t < 0:
        return None
    ph = int(grid.phase[r, c])
    comp = int(grid.component[r, c])
    ambiguous = False
    for drow in (-1, 0, 1):
        for dcol in (-1, 0, 1):
            rr, cc = r + drow, c + dcol
            if 0 <= rr < grid.ny and 0 <= cc < grid.nx:
                if (
                    int(grid.target[rr, cc]) != t
                    or int(grid.phase[rr, cc]) != ph
                    or int(grid.component[rr, cc]) != comp
                ):
                    ambiguous = True
    return t, ph, comp, ambiguous


def classify_type(
    m: MapRep, budget: int = 400, resolution: int = 256
) -> ClassifyResult:
    """Hyperbolic type of a quartic Newton map with four simple roots.

    The two additional critical points are iterated to find their
    targets, then a basin label grid resolves the component relations
    (same component, immediate or not).  Ambiguous membership — a
    critical point within one pixel of a component boundary at twice the
    requested resolution — comes back unresolved rather than guessed.
    """
    roots = _sorted_roots(m)
    if m.degree != 4 or len(roots) != 4:
        raise ValueError("type classification requires a quartic map with four simple roots")
    crits = _free_criticals(m)
    if len(crits) != 2:
        raise ValueError(f"expected two additional critical points, found {len(crits)}")

    targets = tuple(detect_cycle(m, c, budget) for c in crits)
    if any(isinstance(t, CycleRecord) and t.kind == INDETERMINATE for t in targets):
        return ClassifyResult(
            TypeLabel.UNRESOLVED, tuple(crits), targets, None, "orbit budget exhausted"
        )

    anchor_pts: List[complex] = list(roots) + list(crits)
    for t in targets:
        if isinstance(t, CycleRecord):
            anchor_pts.extend(p.value for p in t.points if not p.is_infinite)
    xs = [z.real for z in anchor_pts]
    ys = [z.imag for z in anchor_pts]
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
    half = 0.8 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0) + 0.5
    region = (cx - half, cx + half, cy - half, cy + half)

    label, detail, grid = _classify_on_grid(m, region, resolution, budget, crits, targets)
    if label is TypeLabel.UNRESOLVED and "boundary" in detail:
        label, detail, grid = _classify_on_grid(
            m, region, 2 * resolution, budget, crits, targets
        )
    return ClassifyResult(label, tuple(crits), targets, grid, detail)


def _classify_on_grid(
    m: MapRep,
    region: Tuple[float, float, float, float],
    resolution: int,
    budget: int,
    crits: Sequence[complex],
    targets: Sequence[Union[CycleRecord, RootTarget]],
) -> Tuple[TypeLabel, str, LabelGrid]:
    grid = label_components(m, region, resolution, budget)
    marks: List[Optional[Tuple[int, int, int, bool]]] = []
    for c in crits:
        marks.append(_membership(grid, c))

    # map each detected target onto the grid's target indexing
    def grid_target(t: Union[CycleRecord, RootTarget]) -> Optional[int]:
        if isinstance(t, RootTarget):
            return t.index
        for j, cyc in enumerate(grid.cycles):
            if t.matches(cyc):
                return len(grid.roots) + j
        return None

    infos = []
    for c, t, mark in zip(crits, targets, marks):
        gt = grid_target(t)
        if mark is None or gt is None or mark[0] != gt:
            infos.append(None)
            continue
        tgt, ph, comp, ambiguous = mark
        imm = grid.immediate_component(tgt, ph)
        infos.append(
            {
                "is_root": tgt < len(grid.roots),
                "target": tgt,
                "phase": ph,
                "component": comp,
                "immediate": imm is not None and comp == imm,
                "immediate_known": imm is not None,
                "ambiguous": ambiguous,
            }
        )

    # an unambiguous critical inside the immediate basin of a root settles IE
    for info in infos:
        if (
            info
            and info["is_root"]
            and info["immediate"]
            and not info["ambiguous"]
        ):
            return TypeLabel.IE, "critical in a root's immediate component", grid
    if any(info is None or not info["immediate_known"] for info in infos):
        return TypeLabel.UNRESOLVED, "membership unresolved on grid", grid
    if any(info["ambiguous"] for info in infos):
        return TypeLabel.UNRESOLVED, "critical within a pixel of a boundary", grid

    a, b = infos
    if a["is_root"] and b["is_root"]:
        return TypeLabel.FE2, "both criticals in non-immediate root components", grid
    if a["is_root"] != b["is_root"]:
        root_info = a if a["is_root"] else b
        cyc_info = b if a["is_root"] else a
        if not root_info["immediate"] and cyc_info["immediate"]:
            return TypeLabel.FE1, "root non-immediate with cycle immediate", grid
        return TypeLabel.UNRESOLVED, "mixed targets outside the taxonomy", grid
    if a["target"] == b["target"]:
        if a["immediate"] and b["immediate"]:
            if a["phase"] == b["phase"] and a["component"] == b["component"]:
                return TypeLabel.A, "one immediate component", grid
            return TypeLabel.B, "two immediate components of one cycle", grid
        if a["immediate"] or b["immediate"]:
            return TypeLabel.C, "immediate with non-immediate of one cycle", grid
        return TypeLabel.UNRESOLVED, "cycle basin without immediate critical", grid
    if a["immediate"] and b["immediate"]:
        return TypeLabel.D, "immediate basins of two distinct cycles", grid
    return TypeLabel.UNRESOLVED, "distinct cycles without immediacy", grid


def _band_edges(n: int, workers: int) -> List[Tuple[int, int]]:
    chunk = max(1, n // (4 * workers))
    edges = list(range(0, n, chunk)) + [n]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def per2_type_grid(
    region: Tuple[float, float, float, float] = DEFAULT_PER2_REGION,
    resolution: Union[int, Tuple[int, int]] = 512,
    budget: int = 300,
    workers: Optional[int] = None,
    period_guard: bool = True,
) -> np.ndarray:
    """Type-code grid of the period-two slice over a parameter region.

    Each pixel is classified independently by the compiled kernel, so
    the result is identical for every worker count.  ``period_guard``
    turns detections of free cycles with period other than two into
    ``unresolved`` (the slice pins a superattracting 2-cycle; other
    periods indicate a second cycle whose period the renderer refuses to
    conflate with it).
    """
    if isinstance(resolution, int):
        nx = ny = resolution
    else:
        nx, ny = resolution
    x0, x1, y0, y1 = region
    xs = np.ascontiguousarray(np.linspace(x0, x1, nx))
    ys = np.ascontiguousarray(np.linspace(y0, y1, ny))
    out = np.zeros((ny, nx), np.uint8)
    workers = max(1, workers or os.cpu_count() or 1)
    guard = 1 if period_guard else 0
    if workers == 1:
        _kernels.per2_band(xs, ys, 0, ny, budget, guard, out)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(_kernels.per2_band, xs, ys, j0, j1, budget, guard, out)
                for j0, j1 in _band_edges(ny, workers)
            ]
            for f in futs:
                f.result()
    return out


def _auto_region(m: MapRep) -> Tuple[float, float, float, float]:
    pts = [p.value for p, _ in fixed_points(m) if not p.is_infinite]
    pts += [p.value for p, _ in critical_points(m) if not p.is_infinite]
    xs = [z.real for z in pts]
    ys = [z.imag for z in pts]
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
    half = 0.9 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0) + 0.4
    return (cx - half, cx + half, cy - half, cy + half)


def render_dynamical(
    m: MapRep,
    region: Optional[Tuple[float, float, float, float]] = None,
    resolution: Union[int, Tuple[int, int]] = 512,
    budget: int = 160,
    rays: Iterable[object] = (),
    invert: bool = False,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Basin raster of a Newton map with optional internal-ray overlays.

    Pixels are colored by the index of the absorbing root (deterministic
    palette) and shaded by the absorption time.  With ``invert`` the
    pixel coordinate is read in the 1/z chart, so infinity sits at the
    region's origin and a marker is drawn there; ray overlays are
    transformed accordingly.  Overlay objects need only a ``samples``
    attribute yielding plane points.
    """
    if isinstance(resolution, int):
        nx = ny = resolution
    else:
        nx, ny = resolution
    if region is None:
        region = (-1.2, 1.2, -1.2, 1.2) if invert else _auto_region(m)
    x0, x1, y0, y1 = region
    xs = np.ascontiguousarray(np.linspace(x0, x1, nx))
    ys = np.ascontiguousarray(np.linspace(y0, y1, ny))
    roots = np.array(_sorted_roots(m), np.complex128)
    crits = [p.value for p, _ in critical_points(m) if not p.is_infinite]
    dr = np.ascontiguousarray(_absorption_radii(roots, crits))
    numer = np.ascontiguousarray(m.numer.coeffs.astype(np.complex128))
    denom = np.ascontiguousarray(m.denom.coeffs.astype(np.complex128))

    out_idx = np.zeros((ny, nx), np.int16)
    out_it = np.zeros((ny, nx), np.uint16)
    inv = 1 if invert else 0
    workers = max(1, workers or os.cpu_count() or 1)
    if workers == 1:
        _kernels.basin_band(
            numer, denom, roots, dr, xs, ys, 0, ny, budget, inv, out_idx, out_it
        )
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(
                    _kernels.basin_band,
                    numer, denom, roots, dr, xs, ys, j0, j1, budget, inv,
                    out_idx, out_it,
                )
                for j0, j1 in _band_edges(ny, workers)
            ]
            for f in futs:
                f.result()

    rgb = np.zeros((ny, nx, 3), np.uint8)
    it = out_it.astype(np.float64)
    fade = 0.35 + 0.65 * np.square(1.0 - np.minimum(it / max(budget, 1), 1.0))
    for k in range(len(roots)):
        mask = out_idx == k
        base = ROOT_PALETTE[k % len(ROOT_PALETTE)]
        for ch in range(3):
            rgb[..., ch][mask] = np.clip(base[ch] * fade[mask], 0, 255).astype(np.uint8)

    def to_px(z: complex) -> Optional[Tuple[int, int]]:
        col = (z.real - x0) / (x1 - x0) * (nx - 1)
        row = (z.imag - y0) / (y1 - y0) * (ny - 1)
        if -0.5 <= row < ny - 0.5 and -0.5 <= col < nx - 0.5:
            return int(round(row)), int(round(col))
        return None

    for ray in rays:
        pts: List[complex] = []
        for p in getattr(ray, "samples", ()):  # SpherePoint samples
            if getattr(p, "is_infinite", False):
                continue
            z = p.value
            if invert:
                if z == 0:
                    continue
                z = 1.0 / z
            pts.append(z)
        _draw_polyline(rgb, pts, to_px)

    if invert:
        mark = to_px(0j)
        if mark is not None:
            r, c = mark
            for d in range(-3, 4):
                if 0 <= r + d < ny:
                    rgb[r + d, c] = (255, 255, 255)
                if 0 <= c + d < nx:
                    rgb[r, c + d] = (255, 255, 255)
    return rgb


def _draw_polyline(rgb, pts, to_px, color=(255, 255, 255)) -> None:
    for a, b in zip(pts[:-1], pts[1:]):
        pa, pb = to_px(a), to_px(b)
        if pa is None and pb is None:
            continue
        steps = int(max(abs(b.real - a.real), abs(b.imag - a.imag)) * max(rgb.shape) + 2)
        steps = min(steps, 4 * max(rgb.shape))
        for t in np.linspace(0.0, 1.0, steps):
            px = to_px(a + (b - a) * t)
            if px is not None:
                rgb[px[0], px[1]] = color


def render_parameter(
    region: Tuple[float, float, float, float] = DEFAULT_PER2_REGION,
    resolution: Union[int, Tuple[int, int]] = 512,
    budget: int = 300,
    workers: Optional[int] = None,
    period_guard: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """Colored type map of the period-two slice: (rgb, code grid)."""
    codes = per2_type_grid(region, resolution, budget, workers, period_guard)
    rgb = np.zeros(codes.shape + (3,), np.uint8)
    for code, color in TYPE_PALETTE.items():
        mask = codes == code
        rgb[mask] = color
    return rgb, codes


def _atomic_write(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def write_ppm(path: str, rgb: np.ndarray, comment: str = "") -> str:
    """Write an RGB array as binary PPM (P6).

    ``comment`` (e.g. a serialized configuration) is embedded as header
    comment lines, which every PPM reader skips.
    """
    ny, nx = rgb.shape[:2]
    lines = ["P6"]
    for row in comment.splitlines():
        lines.append("# " + row)
    lines.append(f"{nx} {ny}")
    lines.append("255")
    header = ("\n".join(lines) + "\n").encode("ascii", "replace")
    _atomic_write(path, header + np.ascontiguousarray(rgb, np.uint8).tobytes())
    return path


def write_png(path: str, rgb: np.ndarray, comment: str = "") -> Optional[str]:
    """Write PNG via Pillow when importable; returns None otherwise.

    ``comment`` is stored in a tEXt chunk under the key ``config``.
    """
    try:
        from PIL import Image
        from PIL.PngImagePlugin import PngInfo
    except ImportError:
        return None
    import io

    info = PngInfo()
    if comment:
        info.add_text("config", comment)
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(rgb, np.uint8), "RGB").save(
        buf, "PNG", pnginfo=info
    )
    _atomic_write(path, buf.getvalue())
    return path


def write_image(basepath: str, rgb: np.ndarray, comment: str = "") -> List[str]:
    """Write ``basepath``.ppm always and ``basepath``.png when possible."""
    written = [write_ppm(f"{basepath}.ppm", rgb, comment)]
    png = write_png(f"{basepath}.png", rgb, comment)
    if png:
        written.append(png)
    return written


def write_type_grid(
    path: str,
    codes: np.ndarray,
    region: Tuple[float, float, float, float],
    config: Optional[dict] = None,
) -> str:
    """Serialize a parameter-plane type-code grid (JSON header + bytes)."""
    legend = {label.value: code for label, code in TYPE_CODES.items()}
    legend["masked"] = MASKED_CODE
    header = {
        "region": list(region),
        "resolution": [codes.shape[1], codes.shape[0]],
        "legend": legend,
        "arrays": ["type"],
        "dtype": "<u1",
    }
    if config is not None:
        header["config"] = config
    blob = json.dumps(header, sort_keys=True).encode("utf-8") + b"\n"
    blob += np.ascontiguousarray(codes, np.uint8).tobytes()
    _atomic_write(path, blob)
    return path


def read_type_grid(path: str) -> Tuple[np.ndarray, dict]:
    """Inverse of :func:`write_type_grid`: (codes, header)."""
    with open(path, "rb") as fh:
        meta = json.loads(fh.readline().decode("utf-8"))
        nx, ny = meta["resolution"]
        codes = np.frombuffer(fh.read(nx * ny), np.uint8).reshape(ny, nx).copy()
    return codes, meta


def write_label_grid(
    path: str, grid: LabelGrid, config: Optional[dict] = None
) -> str:
    """Serialize a label grid: one JSON header line, then raw arrays.

    Arrays follow the header in order target/phase/component/steps as
    little-endian int32 rows.
    """
    legend = {f"root{k}": k for k in range(len(grid.roots))}
    for j, cyc in enumerate(grid.cycles):
        legend[f"cycle{j}"] = len(grid.roots) + j
    header = {
        "region": list(grid.region),
        "resolution": [grid.nx, grid.ny],
        "legend": legend,
        "roots": [[r.real, r.imag] for r in grid.roots],
        "cycles": [
            {
                "points": [[p.value.real, p.value.imag] for p in cyc.points],
                "period": cyc.period,
                "multiplier": [cyc.multiplier.real, cyc.multiplier.imag],
                "kind": cyc.kind,
            }
            for cyc in grid.cycles
        ],
        "arrays": ["target", "phase", "component", "steps"],
        "dtype": "<i4",
    }
    if config is not None:
        header["config"] = config
    blob = json.dumps(header, sort_keys=True).encode("utf-8") + b"\n"
    for arr in (grid.target, grid.phase, grid.component, grid.steps):
        blob += np.ascontiguousarray(arr, "<i4").tobytes()
    _atomic_write(path, blob)
    return path


def read_label_grid(path: str) -> LabelGrid:
    """Inverse of :func:`write_label_grid`."""
    with open(path, "rb") as fh:
        head = fh.readline()
        meta = json.loads(head.decode("utf-8"))
        nx, ny = meta["resolution"]
        count = nx * ny
        arrays = []
        for _ in meta["arrays"]:
            raw = fh.read(4 * count)
            arrays.append(np.frombuffer(raw, "<i4").reshape(ny, nx).copy())
    cycles = tuple(
        CycleRecord(
            points=tuple(SpherePoint(complex(x, y)) for x, y in c["points"]),
            period=c["period"],
            multiplier=complex(*c["multiplier"]),
            kind=c["kind"],
        )
        for c in meta["cycles"]
    )
    target, phase, component, steps = arrays
    return LabelGrid(
        region=tuple(meta["region"]),
        nx=nx,
        ny=ny,
        roots=tuple(complex(x, y) for x, y in meta["roots"]),
        cycles=cycles,
        target=target.astype(np.int16),
        phase=phase.astype(np.int16),
        component=component.astype(np.int32),
        steps=steps.astype(np.int32),
    )
