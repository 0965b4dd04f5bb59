"""Internal ray tracing, landing refinement, and co-landing detection.

A ray of angle theta in a basin chart is the psi-image of the radial segment
of that angle in the unit disk. Samples follow the geometric exponent ladder
t_q = r0**(d**(-q/n_sub)), which is compatible with the pullback relation
t -> t**(1/d): the sample at index q is the branch-consistent f-preimage of
the sample at index q - n_sub on the ray of the doubled angle. Rays are
traced in lockstep batches closed under angle doubling, so every pullback
target comes from an earlier level of the same batch; rays on preimage
components are lifted sample-by-sample from their parent chart's batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bottcher import BottcherChart
from .maps import MapRep, advance, periodicity_residual, refine_cycle
from .sphere import (
    INF,
    SpherePoint,
    normalize_angle,
    poly_roots_batch,
    sphere_dist,
)

__all__ = [
    "TraceOptions",
    "LandingCertificate",
    "InternalRay",
    "ColandResult",
    "angle_orbit",
    "trace_ray",
    "trace_rays",
    "landing_refine",
    "coland",
    "functional_residual",
    "ray_to_dict",
]

LANDED = "landed"
TERMINATED_PRECRITICAL = "terminated_precritical"
BUDGET_EXHAUSTED = "budget_exhausted"

_ACTIVE, _LANDED, _PRECRIT, _LOST = 0, 1, 2, 3


@dataclass(frozen=True)
class TraceOptions:
    """Sampling and termination knobs for ray traces.

    n_sub pullback samples per potential level; the trace stops after
    max_levels levels, on tail contraction below land_tol, or on a pullback
    Jacobian below jac_tol (iterated-preimage-of-critical-point hit). Steps
    exceeding step_reject times the previous step abort the branch.
    """

    n_sub: int = 4
    max_levels: int = 96
    land_tol: float = 1e-6
    jac_tol: float = 1e-10
    step_reject: float = 10.0
    seed_potential: Optional[float] = None
    inner_points: int = 10
    inner_min: float = 0.05
    store_samples: bool = True
    refine: bool = True


@dataclass(frozen=True)
class LandingCertificate:
    preperiod: int
    period: int
    residual: float


@dataclass
class InternalRay:
    """A sampled internal ray with its termination verdict."""

    chart: BottcherChart
    angle: Fraction
    potentials: Tuple[float, ...]
    samples: Tuple[SpherePoint, ...]
    status: str
    approx: Optional[SpherePoint] = None
    landing_point: Optional[SpherePoint] = None
    certificate: Optional[LandingCertificate] = None
    note: str = ""

    @property
    def landed(self) -> bool:
        return self.status == LANDED

    def ensure_certificate(self) -> Optional[LandingCertificate]:
        """Refine the landing point and attach the (pre)periodicity certificate."""
        if self.certificate is not None or self.status != LANDED:
            return self.certificate
        d = self.chart.cycle_degree
        pre, per, _ = angle_orbit(self.angle, d)
        p = pre + self.chart.chain_length
        try:
            pt = landing_refine(self.chart.map, self.approx, p, per)
            res = periodicity_residual(self.chart.map, pt, p, per)
        except ValueError as exc:
            self.note = f"refinement failed: {exc}"
            return None
        self.landing_point = pt
        self.certificate = LandingCertificate(p, per, res)
        return self.certificate


def angle_orbit(theta: Fraction, d: int) -> Tuple[int, int, List[Fraction]]:
    """(preperiod, period, orbit) of an angle under multiplication by d mod 1."""
    theta = normalize_angle(theta)
    seen: Dict[Fraction, int] = {}
    seq: List[Fraction] = []
    t = theta
    while t not in seen:
        seen[t] = len(seq)
        seq.append(t)
        t = normalize_angle(t * d)
    pre = seen[t]
    return pre, len(seq) - pre, seq


def _chord_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (
        2.0
        * np.abs(a - b)
        / np.sqrt((1.0 + np.abs(a) ** 2) * (1.0 + np.abs(b) ** 2))
    )


class _Batch:
    """Lockstep state for one chart's ray batch (internal)."""

    def __init__(self, chart: BottcherChart, angles: Sequence[Fraction], opts: TraceOptions):
        self.chart = chart
        self.opts = opts
        base = chart.base
        self.base = base
        self.d = base.local_degree
        self.m = base.map
        # doubling closure
        idx: Dict[Fraction, int] = {}
        order: List[Fraction] = []
        stack = [normalize_angle(t) for t in angles]
        while stack:
            t = stack.pop()
            if t not in idx:
                idx[t] = len(order)
                order.append(t)
                stack.append(normalize_angle(t * self.d))
        self.angles = order
        self.index = idx
        self.A = len(order)
        self.dbl = np.array(
            [idx[normalize_angle(t * self.d)] for t in order], dtype=int
        )
        # pullback chain, outward from the immediate basin
        chain: List[BottcherChart] = []
        c = chart
        while c.parent is not None:
            chain.append(c)
            c = c.parent
        chain.reverse()
        self.chain = chain
        # map coefficient tables for the vectorized solves
        nc = self.m.numer.coeffs
        dc = self.m.denom.coeffs
        width = len(nc)
        self.numer_pad = np.zeros(width, complex)
        self.numer_pad[: len(nc)] = nc
        self.denom_pad = np.zeros(width, complex)
        self.denom_pad[: len(dc)] = dc
        self.wron = self.m.wronskian().coeffs
        self.denomc = dc

    def _fprime_abs(self, z: np.ndarray) -> np.ndarray:
        w = np.polynomial.polynomial.polyval(z, self.wron)
        dv = np.polynomial.polynomial.polyval(z, self.denomc)
        return np.abs(w) / np.maximum(np.abs(dv) ** 2, 1e-300)

    def _pull_col(self, target: np.ndarray, prev: np.ndarray) -> np.ndarray:
        coeffs = self.numer_pad[None, :] - target[:, None] * self.denom_pad[None, :]
        roots = poly_roots_batch(coeffs)
        pick = np.argmin(_chord_arr(roots, prev[:, None]), axis=1)
        return roots[np.arange(len(target)), pick]

    def run(self):
        opts = self.opts
        n = opts.n_sub
        A = self.A
        d = self.d
        base = self.base
        seed_max = min(base.series_radius, 0.9 * base.inj_radius, 0.9)
        if opts.seed_potential is not None:
            r0 = opts.seed_potential
        else:
            r0 = seed_max ** (d ** ((n - 1) / n))
        lnr0 = math.log(r0)
        e2 = np.exp(2j * np.pi * np.array([float(t) for t in self.angles]))

        status = np.zeros(A, dtype=np.int8)
        frozen = np.zeros(A, complex)
        freeze_idx = np.full(A, -1, dtype=int)
        shrink = np.zeros(A, dtype=int)
        prev_step = np.full(A, np.inf)
        stored: List[np.ndarray] = []
        pots: List[float] = []
        chain_cur = [np.full(A, ch.center, complex) for ch in self.chain]

        def lift(col: np.ndarray, active: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            target = col
            jac_bad = np.zeros(A, dtype=bool)
            for i in range(len(self.chain)):
                new = self._pull_col(target, chain_cur[i])
                bad = ~np.isfinite(new)
                new = np.where(bad, chain_cur[i], new)
                jac_bad |= self._fprime_abs(new) < opts.jac_tol
                chain_cur[i] = np.where(active, new, chain_cur[i])
                target = chain_cur[i]
            return target, jac_bad

        def record(out: np.ndarray, t: float):
            if opts.store_samples:
                stored.append(out.copy())
                pots.append(t)

        # inner radial segment, evaluated from the validated series
        all_active = np.ones(A, dtype=bool)
        k_in = opts.inner_points if opts.store_samples else 0
        prev_out = None
        for i in range(k_in):
            t = opts.inner_min * (r0 / opts.inner_min) ** (i / k_in)
            col = np.asarray(base.psi(t * e2), complex)
            out, _ = lift(col, all_active)
            record(out, t)
            prev_out = out
        # seed columns of the pullback ladder
        ring = np.empty((n, A), complex)
        for qi in range(n):
            t = math.exp(lnr0 * d ** (-qi / n))
            col = np.asarray(base.psi(t * e2), complex)
            out, _ = lift(col, all_active)
            ring[qi % n] = col
            record(out, t)
            prev_out = out

        q_cap = opts.max_levels * n
        for q in range(n, q_cap):
            t = math.exp(lnr0 * d ** (-q / n))
            active = status == _ACTIVE
            if not active.any():
                break
            oldest = ring[q % n]
            prev = ring[(q - 1) % n]
            target = oldest[self.dbl]
            new = self._pull_col(target, prev)
            bad = ~np.isfinite(new)
            if bad.any():
                hit = active & bad
                status[hit] = _LOST
                frozen[hit] = prev[hit]
                freeze_idx[hit] = len(stored) - 1
                new = np.where(bad, prev, new)
            jac_bad = self._fprime_abs(new) < opts.jac_tol
            new = np.where(active, new, prev)
            out, jac_bad_chain = lift(new, active)
            jac_bad |= jac_bad_chain
            if prev_out is None:
                prev_out = out
            stepd = _chord_arr(out, prev_out)
            record(out, t)
            # iterated preimage of a critical point: the branch terminates
            hit = active & jac_bad
            if hit.any():
                status[hit] = _PRECRIT
                frozen[hit] = out[hit]
                freeze_idx[hit] = len(stored) - 1
                active = status == _ACTIVE
            # branch-loss guard: a step far beyond the local expected step
            if q > 2 * n:
                lost = (
                    active
                    & (stepd > opts.step_reject * prev_step)
                    & (stepd > 1e-9)
                )
                if lost.any():
                    status[lost] = _LOST
                    frozen[lost] = out[lost]
                    freeze_idx[lost] = len(stored) - 1
                    active = status == _ACTIVE
            # landing: sustained contraction of the tail
            thr = opts.land_tol / (4 * n)
            shrink = np.where(active & (stepd < thr), shrink + 1, 0)
            land = active & (shrink >= 2 * n)
            if land.any():
                status[land] = _LANDED
                frozen[land] = out[land]
                freeze_idx[land] = len(stored) - 1
            prev_step = np.where(active, stepd, prev_step)
            ring[q % n] = new
            prev_out = out

        self.status = status
        self.frozen = frozen
        self.freeze_idx = freeze_idx
        self.stored = stored
        self.pots = pots

    def ray_for(self, theta: Fraction) -> InternalRay:
        theta = normalize_angle(theta)
        a = self.index[theta]
        st = int(self.status[a])
        if st == _LANDED:
            status, note = LANDED, ""
        elif st == _PRECRIT:
            status, note = TERMINATED_PRECRITICAL, ""
        elif st == _LOST:
            status, note = BUDGET_EXHAUSTED, "pullback branch lost"
        else:
            status, note = BUDGET_EXHAUSTED, "level cap reached"
        if self.opts.store_samples and self.stored:
            stop = self.freeze_idx[a]
            upto = len(self.stored) if stop < 0 else stop + 1
            samples = tuple(
                SpherePoint(self.stored[i][a]) for i in range(upto)
            )
            potentials = tuple(self.pots[:upto])
        else:
            samples = ()
            potentials = ()
        if st == _ACTIVE:
            approx = SpherePoint(self.stored[-1][a]) if self.stored else None
        else:
            approx = SpherePoint(self.frozen[a])
        ray = InternalRay(
            chart=self.chart,
            angle=theta,
            potentials=potentials,
            samples=samples,
            status=status,
            approx=approx,
            note=note,
        )
        if status == LANDED and self.opts.refine:
            ray.ensure_certificate()
        return ray


def trace_rays(
    chart: BottcherChart,
    angles: Sequence[Fraction],
    opts: Optional[TraceOptions] = None,
) -> Dict[Fraction, InternalRay]:
    """Trace a batch of rays on one chart; returns {angle: ray} for the request."""
    opts = opts or TraceOptions()
    req = [normalize_angle(Fraction(a)) for a in angles]
    batch = _Batch(chart, req, opts)
    batch.run()
    return {t: batch.ray_for(t) for t in req}


def trace_ray(
    chart: BottcherChart, angle: Fraction, opts: Optional[TraceOptions] = None
) -> InternalRay:
    """Trace one ray (its doubling orbit is traced alongside as pullback data)."""
    angle = normalize_angle(Fraction(angle))
    return trace_rays(chart, [angle], opts)[angle]


def landing_refine(
    m: MapRep, approx, preperiod: int, period: int
) -> SpherePoint:
    """Sharpen a landing estimate to the nearby exactly (pre)periodic point.

    The period-q cycle entry is refined by Newton iteration (the cycle at
    infinity is exact), then pulled back preperiod steps choosing at each
    step the preimage closest to the forward shadow of the estimate.
    """
    approx = SpherePoint.of(approx)
    if approx.is_infinite:
        return INF
    shadow = [approx]
    for _ in range(preperiod):
        shadow.append(m(shadow[-1]))
    entry = shadow[-1]
    near_inf = entry.is_infinite or sphere_dist(entry, INF) < 1e-4
    orb = entry
    for _ in range(period):
        orb = m(orb)
        near_inf = near_inf or orb.is_infinite or sphere_dist(orb, INF) < 1e-4
    if near_inf:
        cyc: SpherePoint = INF
    else:
        cyc = SpherePoint(refine_cycle(m, entry.value, period))
    cur = cyc
    for j in range(preperiod - 1, -1, -1):
        pre = m.preimages(cur)
        ref = shadow[j]
        cur = min(pre, key=lambda x: sphere_dist(x, ref))
    return cur


@dataclass(frozen=True)
class ColandResult:
    """Outcome of a co-landing test; verdict None means indeterminate."""

    verdict: Optional[bool]
    point: Optional[SpherePoint]
    distance: float


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def coland(rayA: InternalRay, rayB: InternalRay, tol: float = 1e-6) -> ColandResult:
    """Do two landed rays share a landing point (within tol, sphere metric)?

    The verdict requires the refined points to agree and a joint refinement
    under the pooled (preperiod, lcm of periods) to reach the same point;
    unrefinable landings yield an indeterminate verdict, never a silent False.
    """
    if not (rayA.landed and rayB.landed):
        raise ValueError("co-landing is defined for two landed rays")
    ca = rayA.ensure_certificate()
    cb = rayB.ensure_certificate()
    if ca is None or cb is None or ca.residual > 1e-9 or cb.residual > 1e-9:
        return ColandResult(None, None, math.inf)
    dist = sphere_dist(rayA.landing_point, rayB.landing_point)
    if dist >= tol:
        return ColandResult(False, None, dist)
    if rayA.landing_point is rayB.landing_point or rayA is rayB:
        return ColandResult(True, rayA.landing_point, 0.0)
    p = max(ca.preperiod, cb.preperiod)
    q = _lcm(ca.period, cb.period)
    m = rayA.chart.map
    ra = landing_refine(m, rayA.approx, p, q)
    rb = landing_refine(m, rayB.approx, p, q)
    d2 = sphere_dist(ra, rb)
    if d2 < tol:
        return ColandResult(True, ra, max(dist, d2))
    return ColandResult(False, None, d2)


def functional_residual(ray: InternalRay, image_ray: InternalRay) -> float:
    """sup distance between f(ray samples) and the matching image-ray samples.

    The image ray is the doubled angle on the same chart (potential t -> t**d)
    or the same angle on the parent chart of a preimage component (t -> t).
    """
    if not (ray.samples and image_ray.samples):
        raise ValueError("both rays must carry stored samples")
    same_chart = ray.chart is image_ray.chart
    k = ray.chart.cycle_degree if same_chart else 1
    ipots = np.array(image_ray.potentials)
    worst = 0.0
    m = ray.chart.map
    for t, s in zip(ray.potentials, ray.samples):
        tt = t**k
        j = int(np.argmin(np.abs(ipots - tt)))
        if abs(ipots[j] - tt) > 1e-9 * (1 + tt):
            continue
        worst = max(worst, sphere_dist(m(s), image_ray.samples[j]))
    return worst


def ray_to_dict(ray: InternalRay) -> dict:
    """JSON-ready summary of a traced ray."""
    d: dict = {
        "component": ray.chart.label,
        "angle": [ray.angle.numerator, ray.angle.denominator],
        "status": ray.status,
        "landing": None,
        "samples": [
            [s.value.real, s.value.imag] for s in ray.samples if not s.is_infinite
        ],
    }
    if ray.status == LANDED and ray.certificate is not None:
        pt = ray.landing_point
        d["landing"] = {
            "point": None if pt.is_infinite else [pt.value.real, pt.value.imag],
            "infinite": pt.is_infinite,
            "preperiod": ray.certificate.preperiod,
            "period": ray.certificate.period,
            "residual": ray.certificate.residual,
        }
    if ray.note:
        d["note"] = ray.note
    return d
