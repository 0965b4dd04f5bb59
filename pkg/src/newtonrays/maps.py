"""Newton maps of polynomials and degenerate numerator/denominator pairs.

A Newton map is stored as a reduced rational fraction numer/denom together
with the generating root data when known. Construction goes through the
partial-fraction form: with distinct roots r_i of multiplicity n_i,

    B(z) = prod (z - r_i),   A(z) = sum_i n_i * prod_{j != i} (z - r_j),

the Newton map is (z*A - B)/A, which is already in lowest terms and has
degree equal to the number of distinct roots.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .sphere import (
    CHART_SWITCH,
    CLUSTER_TOL,
    INF,
    Poly,
    SpherePoint,
    _cluster,
    roots_of,
    solve_poly,
    sphere_dist,
)

__all__ = [
    "NewtonSource",
    "MapRep",
    "DegeneratePair",
    "newton_from_source",
    "newton_of_poly",
    "fixed_points",
    "critical_points",
    "poles",
    "reduce_pair",
    "advance",
    "refine_cycle",
    "periodicity_residual",
]


@dataclass(frozen=True)
class NewtonSource:
    """Roots-with-multiplicities description of the generating polynomial."""

    roots: Tuple[Tuple[complex, int], ...]
    lead: complex = 1.0

    @property
    def total_degree(self) -> int:
        return sum(m for _, m in self.roots)

    def polynomial(self) -> Poly:
        p = Poly([self.lead])
        for r, m in self.roots:
            p = p * Poly.from_roots([r] * m)
        return p


@dataclass
class MapRep:
    """A rational map numer/denom with optional Newton-source provenance."""

    numer: Poly
    denom: Poly
    source: Optional[NewtonSource] = None
    _rev: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return max(self.numer.degree, self.denom.degree)

    def _reversed(self) -> Tuple[np.ndarray, np.ndarray]:
        """w = 1/z chart coefficients, high-first as np.polyval expects.

        Padding both polynomials to the common degree L-1 makes the w-chart
        numerator/denominator exactly the padded z-coefficient arrays read
        back-to-front, i.e. the low-first z arrays *are* the high-first w
        arrays.
        """
        if self._rev is None:
            L = self.degree + 1
            n = np.pad(self.numer.coeffs, (0, L - len(self.numer.coeffs)))
            d = np.pad(self.denom.coeffs, (0, L - len(self.denom.coeffs)))
            self._rev = (n.copy(), d.copy())
        return self._rev

    def __call__(self, z) -> SpherePoint:
        """Sphere-aware evaluation with chart switching near infinity."""
        p = SpherePoint.of(z)
        if p.is_infinite:
            rn, rd = self._reversed()
            if rd[-1] == 0 and rn[-1] != 0:
                # evaluated at w=0: numer lead / denom lead with denom lead 0
                return INF
            return self._eval_chart(0j)
        z = p.value
        if abs(z) > CHART_SWITCH:
            return self._eval_chart(1.0 / z)
        nv = self.numer(z)
        dv = self.denom(z)
        if dv == 0:
            return INF
        val = nv / dv
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            return self._eval_chart(1.0 / z)
        return SpherePoint(val)

    def _eval_chart(self, w: complex) -> SpherePoint:
        rn, rd = self._reversed()
        nv = np.polyval(rn, w)
        dv = np.polyval(rd, w)
        if dv == 0:
            return INF
        val = nv / dv
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            return INF
        return SpherePoint(complex(val))

    def eval_complex(self, z: complex) -> complex:
        """Plain-chart evaluation returning complex(inf) at poles."""
        return self(z).as_complex()

    def wronskian(self) -> Poly:
        """numer' * denom - numer * denom' (vanishes at critical points)."""
        return self.numer.derivative() * self.denom - self.numer * self.denom.derivative()

    def derivative_value(self, z) -> complex:
        """f'(z) in the standard chart (finite z, finite f(z))."""
        z = complex(z)
        dv = self.denom(z)
        return self.wronskian()(z) / dv**2

    def multiplier_at(self, p: SpherePoint) -> complex:
        """Fixed-point multiplier, chart-aware at infinity."""
        if p.is_infinite:
            rn, rd = self._reversed()
            # g(w) = 1/f(1/w) = rd(w)/rn(w); multiplier = g'(0)
            dn = np.polyval(np.polyder(rd), 0j) * np.polyval(rn, 0j)
            dd = np.polyval(rd, 0j) * np.polyval(np.polyder(rn), 0j)
            return complex((dn - dd) / np.polyval(rn, 0j) ** 2)
        return self.derivative_value(p.value)

    def preimages(self, w) -> List[SpherePoint]:
        """All solutions of f(z) = w on the sphere, with deterministic order.

        Near-coincident solutions (multiple preimages at a critical value,
        or coefficient noise splitting an exact multiple root) are merged to
        their cluster mean and repeated with the cluster count.
        """
        target = SpherePoint.of(w)
        deg = self.degree
        if target.is_infinite:
            poly = self.denom
        else:
            poly = self.numer - target.value * self.denom
        sols = solve_poly(poly.coeffs)
        out: List[SpherePoint] = []
        for z, k in _cluster(np.asarray(sols), max(CLUSTER_TOL, 1e-6)):
            if k > 1:
                z = _refine_multiple(poly, z, k)
            out.extend([SpherePoint(z)] * k)
        if len(out) < deg:
            # degree drop means infinity is a preimage with the missing count
            out.extend([INF] * (deg - len(out)))
        out.sort(key=_point_key)
        return out


def _refine_multiple(poly: Poly, z: complex, k: int) -> complex:
    """Sharpen a k-fold root cluster mean via Newton on the (k-1)th derivative.

    A k-fold root of P is a simple root of P^(k-1), where Newton still
    converges quadratically while P itself sits at the roundoff floor.
    """
    g = poly
    for _ in range(k - 1):
        g = g.derivative()
    dg = g.derivative()
    best = complex(z)
    gv = abs(g(best))
    for _ in range(8):
        dv = dg(best)
        if abs(dv) < 1e-300:
            break
        step = g(best) / dv
        if abs(step) > 0.1 * (1 + abs(best)):
            break
        cand = best - step
        gc = abs(g(cand))
        if gc >= gv:
            break
        best, gv = cand, gc
    scale = float(np.max(np.abs(poly.coeffs))) or 1.0
    slack = 1e-12 * scale * (1 + abs(best)) ** poly.degree
    if abs(poly(best)) <= abs(poly(z)) + slack:
        return best
    return complex(z)


def _point_key(p: SpherePoint):
    if p.is_infinite:
        return (1, 0.0, 0.0)
    return (0, round(p.value.real, 9), round(p.value.imag, 9))


def newton_from_source(source: NewtonSource) -> MapRep:
    """Build the Newton map of prod (z - r_i)^{n_i}; degree = #distinct roots."""
    if source.total_degree < 2:
        raise ValueError("Newton map requires total degree >= 2")
    b = Poly([1.0])
    for r, _ in source.roots:
        b = b * Poly([-r, 1.0])
    a = Poly([0.0])
    for i, (_, m) in enumerate(source.roots):
        term = Poly([float(m)])
        for j, (r, _) in enumerate(source.roots):
            if j != i:
                term = term * Poly([-r, 1.0])
        a = a + term
    numer = Poly(np.convolve(a.coeffs, np.array([0.0, 1.0]))) - b
    return MapRep(numer=numer, denom=a, source=source)


def newton_of_poly(p: Poly, tol: float = 1e-10) -> MapRep:
    """Newton map of a polynomial given by coefficients (roots recovered)."""
    if p.degree < 2:
        raise ValueError("Newton map requires degree >= 2")
    roots = roots_of(p)
    source = NewtonSource(roots=tuple(roots), lead=complex(p.coeffs[-1]))
    m = newton_from_source(source)
    # sanity: the rebuilt fraction must agree with z - p/p' away from poles
    return m


def fixed_points(m: MapRep) -> List[Tuple[SpherePoint, complex]]:
    """Finite fixed points with multipliers, plus infinity (always fixed here).

    For Newton maps the finite fixed points are the roots of the generating
    polynomial with multiplier 1 - 1/n for multiplicity n; multipliers are
    computed numerically from the fraction.
    """
    out: List[Tuple[SpherePoint, complex]] = []
    fixeq = Poly(np.convolve(m.denom.coeffs, np.array([0.0, 1.0]))) - m.numer
    if fixeq.degree >= 1:
        for z, _mult in roots_of(fixeq):
            p = SpherePoint(z)
            out.append((p, m.multiplier_at(p)))
    out.sort(key=lambda t: _point_key(t[0]))
    if m.numer.degree > m.denom.degree:
        out.append((INF, m.multiplier_at(INF)))
    return out


def critical_points(m: MapRep) -> List[Tuple[SpherePoint, int]]:
    """Critical points with orders (order k means local degree k+1)."""
    w = m.wronskian()
    out: List[Tuple[SpherePoint, int]] = []
    if w.degree >= 1:
        for z, mult in roots_of(w):
            out.append((SpherePoint(z), mult))
    expected = 2 * m.degree - 2
    found = sum(k for _, k in out)
    if found < expected:
        out.append((INF, expected - found))
    out.sort(key=lambda t: _point_key(t[0]))
    return out


def poles(m: MapRep) -> List[Tuple[SpherePoint, int]]:
    """Finite poles (denominator zeros) with multiplicities."""
    if m.denom.degree < 1:
        return []
    return [(SpherePoint(z), k) for z, k in roots_of(m.denom)]


@dataclass(frozen=True)
class DegeneratePair:
    """A numerator/denominator pair at a fixed ambient degree with holes split off.

    hpart is the monic polynomial vanishing at the finite holes; reduction is
    the residual rational map. Holes at infinity come from a degree drop of
    the pair relative to the ambient degree.
    """

    hpart: Poly
    reduction: MapRep
    holes: Tuple[SpherePoint, ...]
    ambient_degree: int


def reduce_pair(
    numer: Poly, denom: Poly, ambient_degree: int, tol: float = 1e-7
) -> DegeneratePair:
    """Split common (clustered) roots and degree drop into holes + reduction."""
    if max(numer.degree, denom.degree) > ambient_degree:
        raise ValueError("pair degree exceeds ambient degree")
    n_roots = roots_of(numer) if numer.degree >= 1 else []
    d_roots = roots_of(denom) if denom.degree >= 1 else []
    # expand clustered multiplicities back to flat lists
    flat_n = [z for z, k in n_roots for _ in range(k)]
    flat_d = [z for z, k in d_roots for _ in range(k)]
    kept_n, kept_d, common = _split_common(flat_n, flat_d, tol)
    hpart = Poly.from_roots(common)
    red_numer = Poly.from_roots(kept_n, lead=numer.coeffs[-1])
    red_denom = Poly.from_roots(kept_d, lead=denom.coeffs[-1])
    reduction = MapRep(numer=red_numer, denom=red_denom)
    holes: List[SpherePoint] = [SpherePoint(z) for z in common]
    if max(numer.degree, denom.degree) < ambient_degree:
        holes.extend([INF] * (ambient_degree - max(numer.degree, denom.degree)))
    holes.sort(key=_point_key)
    return DegeneratePair(
        hpart=hpart,
        reduction=reduction,
        holes=tuple(holes),
        ambient_degree=ambient_degree,
    )


def _split_common(
    flat_n: List[complex], flat_d: List[complex], tol: float
) -> Tuple[List[complex], List[complex], List[complex]]:
    """Greedily pair numerator roots with denominator roots within tolerance."""
    kept_d = list(flat_d)
    kept_n: List[complex] = []
    common: List[complex] = []
    for zn in flat_n:
        hit = None
        best = tol * (1.0 + abs(zn))
        for j, zd in enumerate(kept_d):
            if abs(zn - zd) <= best:
                hit, best = j, abs(zn - zd)
        if hit is None:
            kept_n.append(zn)
        else:
            if best > 0.5 * tol * (1.0 + abs(zn)):
                warnings.warn(
                    "root pair near the clustering tolerance; hole extraction "
                    "may be ill-conditioned",
                    RuntimeWarning,
                )
            common.append((zn + kept_d.pop(hit)) / 2.0)
    return kept_n, kept_d, common


# ---------------------------------------------------------------------------
# orbit utilities


def advance(m: MapRep, z: SpherePoint, n: int) -> SpherePoint:
    """n-fold application of the map, sphere-aware."""
    for _ in range(n):
        z = m(z)
    return z


def refine_cycle(m: MapRep, z0: complex, q: int, tol: float = 5e-13) -> complex:
    """Newton refinement of a period-q point from a good approximation."""
    z = complex(z0)
    for _ in range(60):
        val = z
        deriv = 1.0 + 0j
        ok = True
        for _ in range(q):
            d = m.derivative_value(val)
            nxt = m(val)
            if nxt.is_infinite:
                ok = False
                break
            deriv *= d
            val = nxt.value
        if not ok:
            raise ValueError("cycle refinement passed through infinity")
        g = val - z
        dg = deriv - 1.0
        if dg == 0:
            break
        step = g / dg
        z = z - step
        if abs(step) < tol * (1.0 + abs(z)):
            break
    return z


def periodicity_residual(m: MapRep, z: SpherePoint, preperiod: int, period: int) -> float:
    """Sphere distance between f^(p+q)(z) and f^p(z)."""
    a = advance(m, z, preperiod)
    b = advance(m, a, period)
    return sphere_dist(a, b)


# ---------------------------------------------------------------------------
# serialization


def map_to_dict(m: MapRep) -> dict:
    d = {
        "numer": [[c.real, c.imag] for c in m.numer.coeffs],
        "denom": [[c.real, c.imag] for c in m.denom.coeffs],
    }
    if m.source is not None:
        d["roots"] = [[r.real, r.imag, k] for r, k in m.source.roots]
    return d


def map_from_dict(d: dict) -> MapRep:
    numer = Poly([complex(a, b) for a, b in d["numer"]])
    denom = Poly([complex(a, b) for a, b in d["denom"]])
    source = None
    if "roots" in d:
        source = NewtonSource(
            roots=tuple((complex(a, b), int(k)) for a, b, k in d["roots"])
        )
    return MapRep(numer=numer, denom=denom, source=source)
