"""Riemann sphere points, the chordal metric, polynomials and root finding.

Conventions used throughout the package:

* infinity is a tagged state on :class:`SpherePoint`, never a large float;
* array-level code encodes infinity as ``complex(inf, 0)`` and every metric
  helper handles that case explicitly;
* polynomial coefficients are stored ascending (``p[k]`` multiplies ``z**k``).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import numpy as np

__all__ = [
    "SpherePoint",
    "INF",
    "sphere_dist",
    "sphere_embed",
    "Poly",
    "roots_of",
    "solve_poly",
    "AffineMap",
    "Mobius",
    "normalize_angle",
]

# Magnitude beyond which evaluation switches to the w = 1/z chart.
CHART_SWITCH = 1.0e8
# Default relative clustering tolerance for multiple roots.
CLUSTER_TOL = 1.0e-8


class SpherePoint:
    """A point of the Riemann sphere: a finite complex number or infinity."""

    __slots__ = ("_value", "_infinite")

    def __init__(self, value: complex = 0j, infinite: bool = False):
        if infinite:
            self._value = complex("inf")
            self._infinite = True
        else:
            z = complex(value)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError("finite SpherePoint requires finite coordinates")
            self._value = z
            self._infinite = False

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(infinite=True)

    @classmethod
    def of(cls, z) -> "SpherePoint":
        """Coerce a complex number (inf-aware) or SpherePoint to a SpherePoint."""
        if isinstance(z, SpherePoint):
            return z
        z = complex(z)
        if math.isinf(abs(z)):
            return cls(infinite=True)
        return cls(z)

    @property
    def is_infinite(self) -> bool:
        return self._infinite

    @property
    def value(self) -> complex:
        """The finite value; raises on infinity."""
        if self._infinite:
            raise ValueError("infinite point has no finite value")
        return self._value

    def as_complex(self) -> complex:
        """The value with infinity encoded as complex(inf, 0) (array interop)."""
        return self._value

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpherePoint):
            return NotImplemented
        if self._infinite or other._infinite:
            return self._infinite and other._infinite
        return self._value == other._value

    def __hash__(self) -> int:
        return hash(("inf",)) if self._infinite else hash(self._value)

    def __repr__(self) -> str:
        return "SpherePoint(inf)" if self._infinite else f"SpherePoint({self._value!r})"


INF = SpherePoint.infinity()


def _chord(a: complex, b: complex) -> float:
    """Chordal distance for complex values with inf handled explicitly."""
    a_inf = math.isinf(abs(a))
    b_inf = math.isinf(abs(b))
    if a_inf and b_inf:
        return 0.0
    if a_inf:
        return 2.0 / math.sqrt(1.0 + abs(b) ** 2)
    if b_inf:
        return 2.0 / math.sqrt(1.0 + abs(a) ** 2)
    return 2.0 * abs(a - b) / math.sqrt((1.0 + abs(a) ** 2) * (1.0 + abs(b) ** 2))


def sphere_dist(a, b) -> float:
    """Chordal metric on the sphere; accepts SpherePoint or complex (inf-aware)."""
    av = a.as_complex() if isinstance(a, SpherePoint) else complex(a)
    bv = b.as_complex() if isinstance(b, SpherePoint) else complex(b)
    return _chord(av, bv)


def sphere_dist_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized chordal metric on complex arrays (inf encodes infinity)."""
    a = np.asarray(a, complex)
    b = np.asarray(b, complex)
    a_inf = ~np.isfinite(a.real) | ~np.isfinite(a.imag)
    b_inf = ~np.isfinite(b.real) | ~np.isfinite(b.imag)
    a_ = np.where(a_inf, 0, a)
    b_ = np.where(b_inf, 0, b)
    num = 2.0 * np.abs(a_ - b_)
    den = np.sqrt((1.0 + np.abs(a_) ** 2) * (1.0 + np.abs(b_) ** 2))
    out = num / den
    only_a = a_inf & ~b_inf
    only_b = b_inf & ~a_inf
    out = np.where(only_a, 2.0 / np.sqrt(1.0 + np.abs(b_) ** 2), out)
    out = np.where(only_b, 2.0 / np.sqrt(1.0 + np.abs(a_) ** 2), out)
    out = np.where(a_inf & b_inf, 0.0, out)
    return out


def sphere_embed(points) -> np.ndarray:
    """Embed sphere points into R^3 so Euclidean distance equals sphere_dist.

    Uses the stereographic embedding onto the sphere of diameter 2 centered
    at the origin of R^3 (north pole = infinity at (0, 0, 1), scaled by 2).
    """
    zs = np.asarray(
        [p.as_complex() if isinstance(p, SpherePoint) else complex(p) for p in points],
        complex,
    )
    inf_mask = ~np.isfinite(zs.real) | ~np.isfinite(zs.imag)
    z = np.where(inf_mask, 0, zs)
    denom = 1.0 + np.abs(z) ** 2
    out = np.empty((len(zs), 3), float)
    out[:, 0] = 2.0 * z.real / denom
    out[:, 1] = 2.0 * z.imag / denom
    out[:, 2] = (np.abs(z) ** 2 - 1.0) / denom
    out[inf_mask] = (0.0, 0.0, 1.0)
    return out


def normalize_angle(theta: Fraction) -> Fraction:
    """Reduce an angle to the fundamental domain [0, 1)."""
    return theta - (theta // 1)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Dense univariate polynomial with ascending complex coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[complex]):
        arr = np.atleast_1d(np.asarray(coeffs, complex))
        # trim exact trailing zeros, keep at least the constant term
        nz = np.nonzero(arr)[0]
        arr = arr[: nz[-1] + 1] if len(nz) else arr[:1] * 0
        self.coeffs = arr

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "Poly":
        c = np.array([lead], complex)
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], complex))
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)

    def derivative(self) -> "Poly":
        if self.degree == 0:
            return Poly([0.0])
        return Poly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return Poly(np.convolve(self.coeffs, other.coeffs))
        return Poly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __add__(self, other) -> "Poly":
        a, b = self.coeffs, Poly._coerce(other).coeffs
        n = max(len(a), len(b))
        return Poly(np.pad(a, (0, n - len(a))) + np.pad(b, (0, n - len(b))))

    def __sub__(self, other) -> "Poly":
        return self + Poly._coerce(other) * (-1.0)

    @staticmethod
    def _coerce(p) -> "Poly":
        return p if isinstance(p, Poly) else Poly([complex(p)])

    def shifted(self, a: complex) -> "Poly":
        """Taylor shift: coefficients of p(a + x)."""
        work = list(self.coeffs[::-1])  # descending
        out = []
        for _ in range(len(work)):
            acc = 0j
            rem = []
            for c in work[:-1]:
                acc = acc * a + c
                rem.append(acc)
            out.append((acc * a + work[-1]) if work else 0j)
            work = rem
            if not work:
                break
        return Poly(out)

    def compose_affine(self, a: complex, b: complex) -> "Poly":
        """Coefficients of p(a*z + b) via Horner in the new variable."""
        res = Poly([self.coeffs[-1]])
        lin = Poly([b, a])
        for c in self.coeffs[-2::-1]:
            res = res * lin + Poly([c])
        return res

    def monic(self) -> "Poly":
        return Poly(self.coeffs / self.coeffs[-1])

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)})"


def _aberth(coeffs: np.ndarray, tol: float, max_iter: int = 120) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration; coeffs ascending, deg >= 1."""
    c = coeffs / coeffs[-1]
    n = len(c) - 1
    # Cauchy bound initial circle with an irrational twist to dodge symmetry
    radius = 1.0 + max(abs(c[:-1])) if n > 0 else 1.0
    k = np.arange(n)
    z = 0.4 * radius * np.exp(2j * np.pi * (k / n + 0.41235))
    dc = c[1:] * np.arange(1, n + 1)
    for _ in range(max_iter):
        p = np.polyval(c[::-1], z)
        dp = np.polyval(dc[::-1], z)
        ratio = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = np.sum(1.0 / diff, axis=1) - 1.0 / 1.0  # diagonal contributed 1
        denom = 1.0 - ratio * s
        step = np.where(denom != 0, ratio / np.where(denom == 0, 1, denom), ratio)
        z = z - step
        if np.max(np.abs(step)) < tol * (1.0 + np.max(np.abs(z))):
            break
    return z


def _cluster(points: np.ndarray, tol: float) -> List[Tuple[complex, int]]:
    """Greedy union of points within a relative tolerance; returns (mean, count)."""
    remaining = list(range(len(points)))
    clusters: List[List[int]] = []
    used = np.zeros(len(points), bool)
    order = np.lexsort((points.imag, points.real))
    for i in order:
        if used[i]:
            continue
        group = [i]
        used[i] = True
        frontier = [i]
        while frontier:
            j = frontier.pop()
            thr = tol * (1.0 + abs(points[j]))
            for k in order:
                if not used[k] and abs(points[k] - points[j]) <= thr:
                    used[k] = True
                    group.append(k)
                    frontier.append(k)
        clusters.append(group)
    out = []
    for g in clusters:
        vals = points[np.array(g)]
        out.append((complex(np.mean(vals)), len(g)))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


def roots_of(p: Poly, tol: float = CLUSTER_TOL) -> List[Tuple[complex, int]]:
    """All finite roots with multiplicities, clustered at relative tolerance tol.

    Aberth-Ehrlich iteration with a numpy.roots fallback when the residual is
    poor; multiple roots are recovered by clustering (the cluster mean cancels
    the leading error term of the symmetric approximation fan).
    """
    coeffs = p.coeffs
    deg = p.degree
    if deg == 0:
        raise ValueError("constant polynomial has no roots to report")
    if deg == 1:
        return [(-coeffs[0] / coeffs[1], 1)]
    approx = _aberth(coeffs, tol=1e-13)
    scale = 1.0 + float(np.max(np.abs(approx)))
    resid = np.max(np.abs(np.polyval(coeffs[::-1], approx))) / (
        abs(coeffs[-1]) * scale**deg
    )
    if not np.isfinite(resid) or resid > 1e-8:
        approx = np.roots(coeffs[::-1])
    clustered = _cluster(approx, tol)
    # polish simple roots by a couple of Newton steps
    dp = p.derivative()
    out = []
    for z, m in clustered:
        if m == 1:
            for _ in range(3):
                pv = p(z)
                dv = dp(z)
                if dv == 0:
                    break
                z = z - pv / dv
        out.append((complex(z), m))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


# ---------------------------------------------------------------------------
# small-degree closed-form solvers (ray pullback hot path)


def _solve2(c0, c1, c2):
    # c2 z^2 + c1 z + c0
    disc = cmath.sqrt(c1 * c1 - 4 * c2 * c0)
    # branch-stable quadratic: avoid cancellation in the small root
    if abs(c1 + disc) >= abs(c1 - disc):
        q = -0.5 * (c1 + disc)
    else:
        q = -0.5 * (c1 - disc)
    r1 = q / c2
    r2 = (c0 / q) if q != 0 else -c1 / c2 - r1
    return [r1, r2]


def _solve3(c0, c1, c2, c3):
    # depressed-cubic Cardano with a branch chosen to keep u non-degenerate
    a = c2 / c3
    b = c1 / c3
    c = c0 / c3
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    # (q/2)^2 + (p/3)^3 via the expanded discriminant: the composed form
    # cancels catastrophically when one root dominates a small pair
    delta = (
        18.0 * a * b * c
        - 4.0 * a**3 * c
        + (a * b) ** 2
        - 4.0 * b**3
        - 27.0 * c * c
    )
    disc = -delta / 108.0
    sq = cmath.sqrt(disc)
    u3 = -q / 2.0 + sq
    if abs(u3) < abs(-q / 2.0 - sq):
        u3 = -q / 2.0 - sq
    if u3 == 0:
        u = 0j
    else:
        u = u3 ** (1.0 / 3.0)
    w = complex(-0.5, math.sqrt(3) / 2.0)
    roots = []
    for k in range(3):
        uk = u * w**k
        if uk == 0:
            t = 0j
        else:
            t = uk - p / (3.0 * uk)
        roots.append(t - a / 3.0)
    return roots


def _solve4(c0, c1, c2, c3, c4):
    # Ferrari via resolvent cubic
    a = c3 / c4
    b = c2 / c4
    c = c1 / c4
    d = c0 / c4
    p = b - 3.0 * a * a / 8.0
    q = c - a * b / 2.0 + a**3 / 8.0
    r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a**4 / 256.0
    if abs(q) < 1e-14 * (1 + abs(p) + abs(r)):
        # biquadratic
        ys = _solve2(r, p, 1.0)
        roots = []
        for y in ys:
            s = cmath.sqrt(y)
            roots.extend([s - a / 4.0, -s - a / 4.0])
        return roots
    # resolvent: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0
    ms = _solve3(-q * q / 8.0, p * p / 4.0 - r, p, 1.0)
    m = max(ms, key=abs)
    s = cmath.sqrt(2.0 * m)
    t1 = -(2.0 * p + 2.0 * m + 2.0 * q / s) if s != 0 else 0j
    t2 = -(2.0 * p + 2.0 * m - 2.0 * q / s) if s != 0 else 0j
    sq1 = cmath.sqrt(t1) / 2.0
    sq2 = cmath.sqrt(t2) / 2.0
    roots = [
        s / 2.0 + sq1 - a / 4.0,
        s / 2.0 - sq1 - a / 4.0,
        -s / 2.0 + sq2 - a / 4.0,
        -s / 2.0 - sq2 - a / 4.0,
    ]
    return roots


def solve_poly(coeffs: Sequence[complex], polish: bool = True) -> np.ndarray:
    """All roots of an ascending-coefficient polynomial (degree <= 4 closed form).

    Leading zeros are trimmed; degrees above 4 fall back to numpy.roots. Each
    closed-form root is polished by Newton steps to machine accuracy.
    """
    c = np.asarray(coeffs, complex)
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        raise ValueError("zero polynomial")
    c = c[: nz[-1] + 1]
    deg = len(c) - 1
    if deg == 0:
        return np.empty(0, complex)
    scale = np.max(np.abs(c))
    c = c / scale
    if deg == 1:
        roots = np.array([-c[0] / c[1]])
    elif deg == 2:
        roots = np.array(_solve2(*c))
    elif deg == 3:
        roots = np.array(_solve3(*c))
    elif deg == 4:
        roots = np.array(_solve4(*c))
    else:
        roots = np.roots(c[::-1])
    if polish and deg >= 2:
        dc = c[1:] * np.arange(1, deg + 1)
        pv = np.polyval(c[::-1], roots)
        for _ in range(2):
            dv = np.polyval(dc[::-1], roots)
            step = np.where(np.abs(dv) > 1e-300, pv / np.where(dv == 0, 1, dv), 0)
            # keep the step bounded to avoid hopping to a different root
            cap = 1.0 + np.abs(roots)
            step = np.where(np.abs(step) < 0.5 * cap, step, 0)
            cand = roots - step
            pc = np.polyval(c[::-1], cand)
            # monotone acceptance: at a numerically multiple root both P and
            # P' sit at the roundoff floor and the Newton step is garbage
            take = np.abs(pc) < np.abs(pv)
            roots = np.where(take, cand, roots)
            pv = np.where(take, pc, pv)
        err = float(_backward_rel(c, roots).max())
        if err > 1e-12:
            alt = np.roots(c[::-1])
            if len(alt) == deg:
                alt = _polish_batch(c[None, :], alt[None, :], steps=4)[0]
                if float(_backward_rel(c, alt).max()) <= err:
                    roots = alt
    return roots


def _backward_rel(c: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Backward error of each root relative to the evaluation magnitude."""
    with np.errstate(all="ignore"):
        pv = np.polyval(c[::-1], roots)
        mag = np.polyval(np.abs(c)[::-1], np.abs(roots))
        rel = np.abs(pv) / (mag + 1e-300)
    return np.where(np.isfinite(rel), rel, np.inf)


# ---------------------------------------------------------------------------
# vectorized closed-form solvers (lockstep ray pullback over many angles)


def _polish_batch(c: np.ndarray, roots: np.ndarray, steps: int = 2) -> np.ndarray:
    deg = c.shape[1] - 1
    dc = c[:, 1:] * np.arange(1, deg + 1)

    def _eval(cs, z, top):
        v = np.zeros_like(z)
        for k in range(top, -1, -1):
            v = v * z + cs[:, k, None]
        return v

    pv = _eval(c, roots, deg)
    for _ in range(steps):
        dv = _eval(dc, roots, deg - 1)
        step = np.where(np.abs(dv) > 1e-300, pv / np.where(dv == 0, 1, dv), 0)
        cap = 1.0 + np.abs(roots)
        step = np.where(np.abs(step) < 0.5 * cap, step, 0)
        cand = roots - step
        pc = _eval(c, cand, deg)
        # monotone acceptance (multiple roots leave Newton data at the
        # roundoff floor, making the raw step garbage)
        take = np.abs(pc) < np.abs(pv)
        roots = np.where(take, cand, roots)
        pv = np.where(take, pc, pv)
    return roots


def _solve2_vec(b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Roots of z^2 + b z + c = 0, shape (B, 2), cancellation-safe."""
    sq = np.sqrt(b * b - 4.0 * c + 0j)
    flip = np.abs(b + sq) < np.abs(b - sq)
    sq = np.where(flip, -sq, sq)
    big = -0.5 * (b + sq)
    small = np.where(np.abs(big) > 1e-300, c / np.where(big == 0, 1, big), -b - big)
    return np.stack([big, small], axis=1)


def _solve3_vec(c: np.ndarray) -> np.ndarray:
    """Roots of ascending cubics, input (B, 4) with nonzero leading column."""
    a2 = c[:, 2] / c[:, 3]
    a1 = c[:, 1] / c[:, 3]
    a0 = c[:, 0] / c[:, 3]
    sh = a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    # expanded discriminant (see _solve3): stable when one root dominates
    delta = (
        18.0 * a2 * a1 * a0
        - 4.0 * a2**3 * a0
        + (a2 * a1) ** 2
        - 4.0 * a1**3
        - 27.0 * a0 * a0
    )
    sq = np.sqrt(-delta / 108.0 + 0j)
    u3a = -q / 2.0 + sq
    u3b = -q / 2.0 - sq
    u3 = np.where(np.abs(u3a) >= np.abs(u3b), u3a, u3b)
    u = np.where(u3 == 0, 0j, u3 ** (1.0 / 3.0))
    w = complex(-0.5, math.sqrt(3) / 2.0)
    uk = np.stack([u, u * w, u * w * w], axis=1)
    safe = np.abs(uk) > 1e-300
    ys = np.where(safe, uk - p[:, None] / np.where(safe, 3.0 * uk, 1), 0j)
    # u == 0 only when p ~ 0: the depressed cubic is y^3 = -q
    degen = ~safe
    if np.any(degen):
        cb = np.where(q == 0, 0j, (-q + 0j) ** (1.0 / 3.0))
        alt = np.stack([cb, cb * w, cb * w * w], axis=1)
        ys = np.where(degen, alt, ys)
    roots = ys - sh[:, None]
    return _polish_batch(c, roots)


def _solve4_vec(c: np.ndarray) -> np.ndarray:
    """Roots of ascending quartics, input (B, 5) with nonzero leading column."""
    a = c[:, 3] / c[:, 4]
    b = c[:, 2] / c[:, 4]
    cc = c[:, 1] / c[:, 4]
    d = c[:, 0] / c[:, 4]
    sh = a / 4.0
    p = b - 3.0 * a * a / 8.0
    q = cc - a * b / 2.0 + a**3 / 8.0
    r = d - a * cc / 4.0 + a * a * b / 16.0 - 3.0 * a**4 / 256.0
    # resolvent: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0
    res = np.stack(
        [-q * q / 8.0, p * p / 4.0 - r, p, np.ones_like(p)], axis=1
    )
    ms = _solve3_vec(res)
    m = ms[np.arange(len(ms)), np.argmax(np.abs(ms), axis=1)]
    s = np.sqrt(2.0 * m + 0j)
    safe = np.abs(s) > 1e-150
    qs = np.where(safe, q / np.where(safe, s, 1), 0j)
    t1 = -(2.0 * p + 2.0 * m + 2.0 * qs)
    t2 = -(2.0 * p + 2.0 * m - 2.0 * qs)
    sq1 = np.sqrt(t1 + 0j) / 2.0
    sq2 = np.sqrt(t2 + 0j) / 2.0
    h = s / 2.0
    roots = np.stack([h + sq1, h - sq1, -h + sq2, -h - sq2], axis=1)
    # s ~ 0 means q ~ 0 (biquadratic): y^2 solves z^2 + p z + r
    degen = ~safe
    if np.any(degen):
        y2 = _solve2_vec(p, r)
        sy = np.sqrt(y2 + 0j)
        alt = np.stack([sy[:, 0], -sy[:, 0], sy[:, 1], -sy[:, 1]], axis=1)
        roots = np.where(degen[:, None], alt, roots)
    roots = roots - sh[:, None]
    return _polish_batch(c, roots)


def poly_roots_batch(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a batch of same-degree polynomials, shape (B, deg+1) -> (B, deg).

    The leading column must be bounded away from zero (true for Newton-map
    preimage equations, whose leading coefficient is parameter-independent).
    Degrees 2-4 use vectorized closed forms with Newton polish and a per-row
    eigenvalue fallback for ill-conditioned rows; other degrees always use
    the per-row solve.
    """
    c = np.asarray(coeffs, complex)
    deg = c.shape[1] - 1
    if deg == 1:
        return (-c[:, 0] / c[:, 1])[:, None]
    if deg == 2:
        roots = _polish_batch(c, _solve2_vec(c[:, 1] / c[:, 2], c[:, 0] / c[:, 2]))
    elif deg == 3:
        roots = _solve3_vec(c)
    elif deg == 4:
        roots = _solve4_vec(c)
    else:
        return np.stack([np.sort_complex(solve_poly(row)) for row in c])
    # Per-root backward error relative to the evaluation magnitude
    # sum_k |c_k||z|^k, which stays meaningful for tiny roots of badly
    # scaled rows (a coefficient-scale denominator waves junk through).
    pv = np.zeros_like(roots)
    for k in range(deg, -1, -1):
        pv = pv * roots + c[:, k, None]
    az = np.abs(roots)
    ac = np.abs(c)
    mag = np.zeros(az.shape)
    for k in range(deg, -1, -1):
        mag = mag * az + ac[:, k, None]
    rel = np.abs(pv) / (mag + 1e-300)
    bad = np.where(np.any(~np.isfinite(rel) | (rel > 1e-12), axis=1))[0]
    for i in bad:
        ri = np.roots(c[i, ::-1])
        if len(ri) == deg:
            roots[i] = _polish_batch(c[i : i + 1], ri[None, :], steps=4)[0]
    return roots


# ---------------------------------------------------------------------------
# affine and Mobius maps


@dataclass(frozen=True)
class AffineMap:
    """z -> a*z + b."""

    a: complex
    b: complex

    def __call__(self, z: complex) -> complex:
        return self.a * z + self.b

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.a, -self.b / self.a)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: z -> self(other(z))."""
        return AffineMap(self.a * other.a, self.a * other.b + self.b)


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d), ad - bc != 0; sphere-aware application."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __call__(self, z) -> SpherePoint:
        p = SpherePoint.of(z)
        if p.is_infinite:
            if self.c == 0:
                return INF
            return SpherePoint(self.a / self.c)
        z = p.value
        den = self.c * z + self.d
        if den == 0:
            return INF
        return SpherePoint((self.a * z + self.b) / den)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)
