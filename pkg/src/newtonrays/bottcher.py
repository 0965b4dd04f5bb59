"""Local conjugacy charts at superattracting centers and their pullbacks.

At a superattracting fixed point u of local degree d the chart psi solves

    f(psi(w)) = psi(w**d),        psi(0) = u,  psi'(0) = b1,

with b1**(d-1) = 1/a_d where f(u+x) = u + a_d x**d + ... . The series is
computed by a Newton iteration in power-series space whose working order
doubles per step, then validated against the actual map on a test circle.
For d = 2 the chart is unique; for d >= 3 the principal branch of
a_d**(-1/(d-1)) fixes the remaining root-of-unity freedom (recorded in
``phase_convention``).

Preimage components carry pullback charts phi_U = phi_V o f (local degree 1)
represented by the chain of component centers down to an immediate basin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .maps import MapRep, refine_cycle
from .sphere import INF, SpherePoint, sphere_dist

__all__ = [
    "BottcherChart",
    "DeformationRecord",
    "chart_at_root",
    "chart_at_preimage",
    "track_deformation",
    "conjugacy_residual",
]

DEFAULT_ORDER = 128
MAX_ORDER = 512
RESIDUAL_TARGET = 1e-9


# --- power series helpers (ascending coefficient arrays) -------------------


def _smul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    return np.convolve(a, b)[:m]


def _sdiv(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Series quotient a/b to order m; requires b[0] != 0."""
    out = np.zeros(m, complex)
    acc = np.zeros(m, complex)
    acc[: min(m, len(a))] = a[:m]
    bb = np.zeros(m, complex)
    bb[: min(m, len(b))] = b[:m]
    inv0 = 1.0 / bb[0]
    for k in range(m):
        c = acc[k] * inv0
        out[k] = c
        if c != 0:
            acc[k:] -= c * bb[: m - k]
    return out


def _scomp(f: np.ndarray, u: np.ndarray, m: int) -> np.ndarray:
    """f(u(w)) to order m by Horner; u[0] must be 0."""
    r = np.zeros(m, complex)
    for c in f[::-1]:
        r = _smul(r, u, m)
        r[0] += c
    return r


def _subs_pow(u: np.ndarray, d: int, m: int) -> np.ndarray:
    """u(w**d) to order m."""
    out = np.zeros(m, complex)
    n = min((m - 1) // d, len(u) - 1)
    out[: n * d + 1 : d] = u[: n + 1]
    return out


def _local_series(m: MapRep, center: complex, order: int) -> np.ndarray:
    """Series of f(center + x) - center to the given order."""
    ns = m.numer.shifted(center).coeffs
    ds = m.denom.shifted(center).coeffs
    if abs(ds[0]) < 1e-13 * (1.0 + float(np.max(np.abs(ds)))):
        raise ValueError("center is a pole; no local series")
    f = _sdiv(ns, ds, order)
    f[0] -= center
    return f


def _solve_conjugacy(fser: np.ndarray, d: int, order: int) -> np.ndarray:
    """Series u with f(u(w)) = u(w**d), u = b1 w + ..., by doubling Newton."""
    a_d = fser[d]
    if d == 2:
        b1 = 1.0 / a_d
    else:
        b1 = a_d ** (-1.0 / (d - 1))
    u = np.zeros(2, complex)
    u[1] = b1
    fprime = np.concatenate([np.arange(1, len(fser)) * fser[1:], [0j]])
    k = 2
    while k < order:
        k = min(2 * k, order)
        u = np.pad(u, (0, k - len(u)))
        for _ in range(2):
            work = k + d - 1
            resid = _scomp(fser[: work + 1], u, work) - _subs_pow(u, d, work)
            fpu = _scomp(fprime[:work], u, work)
            v = d - 1
            # resid and f'(u) share the valuation w**(d-1) shift: the quotient
            # starts at w**1 and is the coefficient correction
            delta = _sdiv(resid[v:], fpu[v:], work - v)
            u[: min(k, len(delta))] -= delta[: min(k, len(delta))]
            u[0] = 0.0
    return u


@dataclass
class BottcherChart:
    """A conjugacy chart on a basin component.

    Immediate-basin charts own a series; preimage charts reference a parent
    chart and a component center (local degree 1, chart = parent after f).
    """

    map: MapRep
    center: complex
    local_degree: int
    series: Optional[np.ndarray] = field(default=None, repr=False)
    series_radius: float = 0.0
    residual: float = math.inf
    inj_radius: float = 1.0
    parent: Optional["BottcherChart"] = None
    label: str = ""
    phase_convention: str = "principal"

    @property
    def is_immediate(self) -> bool:
        return self.parent is None

    @property
    def base(self) -> "BottcherChart":
        """The immediate-basin chart at the end of the pullback chain."""
        c = self
        while c.parent is not None:
            c = c.parent
        return c

    @property
    def chain_length(self) -> int:
        n = 0
        c = self
        while c.parent is not None:
            n += 1
            c = c.parent
        return n

    @property
    def cycle_degree(self) -> int:
        """Angle-doubling factor of the chart (base local degree; 1 for chains)."""
        return self.local_degree

    def psi(self, w):
        """Series evaluation of the inverse coordinate (immediate charts)."""
        if self.series is None:
            raise ValueError("preimage charts have no own series; lift rays instead")
        w = np.asarray(w, complex)
        val = np.polynomial.polynomial.polyval(w, self.series)
        return self.center + val

    def psi_deriv(self, w):
        if self.series is None:
            raise ValueError("preimage charts have no own series")
        dser = self.series[1:] * np.arange(1, len(self.series))
        return np.polynomial.polynomial.polyval(np.asarray(w, complex), dser)

    def phi_local(self, z: complex, guess: complex) -> complex:
        """Invert the series near the center by Newton from the given guess."""
        w = complex(guess)
        for _ in range(40):
            if not (math.isfinite(w.real) and math.isfinite(w.imag)) or abs(w) > 1.5:
                return complex("nan")
            err = complex(self.psi(w)) - z
            dv = complex(self.psi_deriv(w))
            if dv == 0:
                break
            step = err / dv
            w = w - step
            if abs(step) <= 1e-15 * (1.0 + abs(w)):
                break
        return w

    def potential_of(self, z: complex, budget: int = 400) -> Optional[float]:
        """|phi| of a point attracted to the chart center (orbit-tail method).

        Iterates into the linearization region and pulls the modulus back
        through the functional equation; returns None if the orbit does not
        approach the center within the budget.
        """
        base = self.base
        b1 = base.series[1]
        d = base.local_degree
        zc = complex(z)
        scale = 1.0 + abs(base.center)
        for n in range(budget):
            dist = abs(zc - base.center)
            if dist < 1e-6 * scale:
                if dist == 0:
                    return 0.0
                ln_pot = (math.log(dist / abs(b1))) / (d**n)
                return math.exp(ln_pot)
            nxt = base.map(zc)
            if nxt.is_infinite:
                return None
            zc = nxt.value
            if abs(zc) > 1e12:
                return None
        return None


def chart_at_root(
    m: MapRep,
    root: complex,
    order: int = DEFAULT_ORDER,
    test_radius: float = 0.6,
    label: str = "",
) -> BottcherChart:
    """Build and validate the chart at a superattracting fixed point."""
    root = complex(root)
    fix = m(root)
    if fix.is_infinite or abs(fix.value - root) > 1e-8 * (1 + abs(root)):
        raise ValueError("center is not fixed under the map")
    probe_order = 8
    fser = _local_series(m, root, probe_order)
    scale = max(1.0, float(np.max(np.abs(fser[: probe_order]))))
    if abs(fser[1]) > 1e-7 * scale:
        raise ValueError("center is not superattracting (multiplier != 0)")
    d = next((j for j in range(2, probe_order) if abs(fser[j]) > 1e-9 * scale), None)
    if d is None:
        raise ValueError("could not determine the local degree at the center")
    # the numerically reliable radius can sit well below the disk of the true
    # chart (high-order coefficients accumulate amplified roundoff), so the
    # series is validated against the actual map, walking the radius down and
    # the order up until the residual target is met
    ord_now = order
    chart = None
    while True:
        fser = _local_series(m, root, ord_now + d + 2)
        series = _solve_conjugacy(fser, d, ord_now)
        chart = BottcherChart(
            map=m,
            center=root,
            local_degree=d,
            series=series,
            label=label or f"b({root.real:.6g}{root.imag:+.6g}j)",
        )
        r = test_radius
        while r >= 0.15:
            res = conjugacy_residual(chart, r)
            if res < RESIDUAL_TARGET:
                chart.residual = res
                chart.series_radius = r
                break
            r *= 0.85
        if chart.series_radius > 0:
            break
        if ord_now >= MAX_ORDER:
            raise ValueError(
                "conjugacy series failed validation at every tested radius"
            )
        ord_now *= 2
    # conservative injectivity radius from critical points attracted to root
    from .maps import critical_points

    r_inj = 1.0
    for p, _k in critical_points(m):
        if p.is_infinite:
            continue
        if abs(p.value - root) < 1e-12:
            continue
        pot = chart.potential_of(p.value)
        if pot is not None and pot < r_inj:
            r_inj = pot
    chart.inj_radius = r_inj
    return chart


def chart_at_preimage(
    m: MapRep, parent: BottcherChart, component_center: complex, label: str = ""
) -> BottcherChart:
    """Pullback chart phi_U = phi_V o f on the component of a center preimage."""
    c0 = complex(component_center)
    img = m(c0)
    if img.is_infinite or abs(img.value - parent.center) > 1e-7 * (
        1 + abs(parent.center)
    ):
        raise ValueError("component center does not map to the parent center")
    jac = m.derivative_value(c0)
    if abs(jac) < 1e-8:
        raise ValueError(
            "critical point on the pullback chain; the component is not degree 1"
        )
    return BottcherChart(
        map=m,
        center=c0,
        local_degree=parent.local_degree,
        series=None,
        parent=parent,
        label=label or f"{parent.label}^pre({c0.real:.6g}{c0.imag:+.6g}j)",
    )


def conjugacy_residual(
    chart: BottcherChart, radius: float, samples: int = 64
) -> float:
    """sup |phi(f(psi(w))) - w**d| over a circle of the given radius.

    phi is realized by Newton inversion of the chart series, so the residual
    measures the chart against the actual map, not against itself.
    """
    d = chart.local_degree
    ws = radius * np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    worst = 0.0
    if chart.is_immediate:
        for w in ws:
            z = complex(chart.psi(w))
            fz = chart.map(z)
            if fz.is_infinite:
                return math.inf
            wd = w**d
            back = chart.phi_local(fz.value, wd)
            err = abs(back - wd)
            if not math.isfinite(err):
                return math.inf
            worst = max(worst, err)
        return worst
    # chained chart: f o psi_U must reproduce the parent coordinate pointwise
    for w in ws:
        z = _lift_point(chart, w)
        fz = chart.map(z)
        if fz.is_infinite:
            return math.inf
        parent = chart.parent
        pval = (
            complex(parent.psi(w)) if parent.is_immediate else _lift_point(parent, w)
        )
        err = abs(fz.value - pval)
        if not math.isfinite(err):
            return math.inf
        worst = max(worst, err)
    return worst


def _lift_point(chart: BottcherChart, w: complex, steps: int = 12) -> complex:
    """psi_U(w) for a chained chart by radial branch continuation from the center."""
    ts = np.linspace(0.0, 1.0, steps + 1)[1:]
    charts: List[BottcherChart] = []
    c = chart
    while c.parent is not None:
        charts.append(c)
        c = c.parent
    base = c
    cur = [ch.center for ch in charts]
    for t in ts:
        target = complex(base.psi(t * w))
        for i in range(len(charts) - 1, -1, -1):
            ch = charts[i]
            pre = ch.map.preimages(target)
            ref = cur[i]
            best = min(
                (p for p in pre if not p.is_infinite),
                key=lambda p: abs(p.value - ref),
                default=None,
            )
            if best is None:
                raise ValueError("lost the branch while lifting a chart point")
            cur[i] = best.value
            target = cur[i]
        # after the loop target is psi of the outermost chart at t*w
    return cur[0] if charts else complex(base.psi(w))


# --- deformation tracking ---------------------------------------------------


@dataclass(frozen=True)
class DeformationRecord:
    """A (pre)periodic center of a limit map matched in a perturbed map."""

    base_center: complex
    tracked_center: complex
    preperiod: int
    period: int
    local_degree_limit: int
    local_degree_perturbed: int
    residual: float

    @property
    def degree_match(self) -> bool:
        return self.local_degree_limit == self.local_degree_perturbed


def _orbit_structure(
    m: MapRep, z0: complex, tol: float = 1e-8, budget: int = 64
) -> Tuple[int, int, List[SpherePoint]]:
    """Minimal (preperiod, period) of a numerically (pre)periodic point."""
    orbit: List[SpherePoint] = [SpherePoint(z0)]
    for _ in range(budget):
        orbit.append(m(orbit[-1]))
        n = len(orbit) - 1
        for p in range(n):
            if sphere_dist(orbit[n], orbit[p]) < tol:
                return p, n - p, orbit
    raise ValueError("center is not (pre)periodic within the budget")


def _local_degree_at(m: MapRep, z: complex) -> int:
    fser = _local_series(m, z, 8)
    # the constant term is f(z) - z which need not vanish for non-fixed z;
    # the local degree reads off the first significant derivative
    scale = max(1.0, float(np.max(np.abs(fser[:8]))))
    for j in range(1, 8):
        if abs(fser[j]) > 1e-7 * scale:
            return j
    return 8


def track_deformation(
    limit: MapRep,
    perturbed: MapRep,
    base_center: complex,
    search_radius: Optional[float] = None,
) -> DeformationRecord:
    """Locate the (pre)periodic center of the perturbed map near a limit center."""
    base_center = complex(base_center)
    if abs(limit.denom(base_center)) < 1e-12 * (
        1 + float(np.max(np.abs(limit.denom.coeffs)))
    ):
        raise ValueError("base center is a pole of the limit map")
    p, q, orbit = _orbit_structure(limit, base_center)
    if any(pt.is_infinite for pt in orbit[: p + 1]):
        raise ValueError("limit center orbit passes through infinity before its cycle")
    cycle_entry = orbit[p]
    if cycle_entry.is_infinite:
        tracked_cycle: SpherePoint = INF
    else:
        tracked_cycle = SpherePoint(refine_cycle(perturbed, cycle_entry.value, q))
    # pull the refined cycle point back along the shadow of the limit orbit
    cur = tracked_cycle
    for j in range(p - 1, -1, -1):
        ref = orbit[j]
        pre = perturbed.preimages(cur)
        best = min(pre, key=lambda x: sphere_dist(x, ref))
        cur = best
    if cur.is_infinite:
        raise ValueError("tracked center escaped to infinity")
    tracked = cur.value
    radius = search_radius if search_radius is not None else 0.5 * (1 + abs(base_center))
    if abs(tracked - base_center) > radius:
        raise ValueError("no matching center within the search radius")
    # residual of the (pre)periodicity equation for the tracked point
    a = SpherePoint(tracked)
    for _ in range(p):
        a = perturbed(a)
    b = a
    for _ in range(q):
        b = perturbed(b)
    residual = sphere_dist(a, b)
    return DeformationRecord(
        base_center=base_center,
        tracked_center=tracked,
        preperiod=p,
        period=q,
        local_degree_limit=_local_degree_at(limit, base_center),
        local_degree_perturbed=_local_degree_at(perturbed, tracked),
        residual=residual,
    )
