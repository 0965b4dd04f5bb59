"""Compiled per-pixel kernels for basin rasters and the quartic type scan.

Everything here is written so that each pixel is classified independently,
with no shared mutable state between pixels.  Callers split the image into
row bands and run the band functions on worker threads (the functions are
compiled ``nogil``); since a pixel's output never depends on scheduling,
the rendered bytes are identical for any thread count.

The quartic slice handled by :func:`per2_band` is the family

    P_c(z) = z^4/12 - c z^3/6 + (4c-3) z/12 + (3-4c)/12,

whose Newton map sends 1 to 0 and 0 to 1 for every non-degenerate ``c``,
so the critical point 0 always sits on a superattracting 2-cycle and the
classification of the pair of additional critical points ``{0, c}``
reduces to locating the orbit of ``c``.  Clearing denominators,

    f_c(z) = (3 z^4 - 4c z^3 + (4c-3)) / (4 z^3 - 6c z^2 + (4c-3)).

Type codes emitted by the classifier (see ``classify.TypeLabel``):

    0  A           both additional criticals in one immediate component
    1  B           same cycle, two immediate components
    2  C           cycle basin but not immediate
    3  D           a second attracting cycle absorbs ``c``
    4  IE          ``c`` in the immediate basin of a root
    5  FE1         ``c`` in a root basin but not its immediate component
    7  unresolved  budget exhausted or membership ambiguous
    8  masked      degenerate parameter (collided roots)

FE2 (code 6) requires both additional criticals in root basins away from
the immediate components; in this slice 0 is on the 2-cycle, so FE2 never
occurs and the code is reserved for the general classifier.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CAP = 1e15  # magnitude cap; infinity is repelling so capped orbits re-enter

# verdict kinds used between kernels
_K_ROOT = 0
_K_CYCLE = 1
_K_OTHER = 2
_K_NONE = 3

# emitted type codes
A, B, C, D, IE, FE1, FE2 = 0, 1, 2, 3, 4, 5, 6
UNRES = 7
MASKED = 8


@njit(cache=True, nogil=True)
def _f_per2(z, c):
    """One step of the quartic Newton map of the slice at parameter c."""
    den = ((4.0 * z - 6.0 * c) * z) * z + (4.0 * c - 3.0)
    num = ((3.0 * z - 4.0 * c) * z) * z * z + (4.0 * c - 3.0)
    if den == 0:
        den = 1e-300 + 0.0j
    w = num / den
    a = abs(w)
    if a > CAP or a != a:
        if a != a:
            return complex(CAP, 0.0)
        return w * (CAP / a)
    return w


@njit(cache=True, nogil=True)
def _quartic_roots(a3, a2, a1, a0):
    """Roots of the monic quartic via Durand-Kerner with Newton polish.

    The starting points are the standard deterministic spiral, so the
    output ordering depends only on the coefficients.
    """
    p = np.empty(4, np.complex128)
    r = 1.0 + max(max(abs(a3), abs(a2)), max(abs(a1), abs(a0)))
    u = 0.4 + 0.9j
    seed = 1.0 + 0.0j
    for k in range(4):
        seed = seed * u
        p[k] = seed * r
    for _ in range(80):
        moved = 0.0
        for k in range(4):
            z = p[k]
            val = (((z + a3) * z + a2) * z + a1) * z + a0
            den = 1.0 + 0.0j
            for j in range(4):
                if j != k:
                    den = den * (z - p[j])
            if den == 0:
                continue
            step = val / den
            p[k] = z - step
            m = abs(step)
            if m > moved:
                moved = m
        if moved < 1e-14 * r:
            break
    for k in range(4):  # two Newton steps sharpen simple roots to full precision
        for _ in range(2):
            z = p[k]
            val = (((z + a3) * z + a2) * z + a1) * z + a0
            der = ((4.0 * z + 3.0 * a3) * z + 2.0 * a2) * z + a1
            if der != 0:
                p[k] = z - val / der
    return p


@njit(cache=True, nogil=True)
def _absorb_quick(z0, c, roots, dr, d0, d1, budget):
    """Orbit z0 until a certified target disk absorbs it.

    Returns (kind, index, phase, steps).  Entry into a disk only counts
    after a short confirmation that the orbit keeps contracting toward
    the target, which rejects grazing passes near a disk that strays
    into foreign components.
    """
    z = z0
    for n in range(budget + 1):
        for k in range(4):
            if abs(z - roots[k]) < dr[k]:
                w = z
                prev = abs(w - roots[k])
                ok = True
                for _ in range(3):
                    w = _f_per2(w, c)
                    d = abs(w - roots[k])
                    if d > 0.7 * prev + 1e-300:
                        ok = False
                        break
                    prev = d
                if ok:
                    return _K_ROOT, k, 0, n
        near0 = abs(z) < d0
        near1 = abs(z - 1.0) < d1
        if near0 or near1:
            i = 0 if near0 else 1
            wi = 0.0j if near0 else 1.0 + 0.0j
            w = z
            prev = abs(w - wi)
            ok = True
            for _ in range(3):
                w = _f_per2(_f_per2(w, c), c)
                d = abs(w - wi)
                if d > 0.75 * prev + 1e-300:
                    ok = False
                    break
                prev = d
            if ok:
                return _K_CYCLE, i, (i + n) & 1, n
        z = _f_per2(z, c)
    return _K_NONE, -1, -1, budget


@njit(cache=True, nogil=True)
def _absorb_full(z0, c, roots, dr, d0, d1, budget):
    """Like _absorb_quick but also detects additional attracting cycles.

    Returns (kind, index, phase, period): for kind _K_OTHER the index slot
    carries the minimal period of the detected cycle.
    """
    ring = np.empty(48, np.complex128)
    z = z0
    for n in range(budget + 1):
        for k in range(4):
            if abs(z - roots[k]) < dr[k]:
                w = z
                prev = abs(w - roots[k])
                ok = True
                for _ in range(3):
                    w = _f_per2(w, c)
                    d = abs(w - roots[k])
                    if d > 0.7 * prev + 1e-300:
                        ok = False
                        break
                    prev = d
                if ok:
                    return _K_ROOT, k, 0, n
        near0 = abs(z) < d0
        near1 = abs(z - 1.0) < d1
        if near0 or near1:
            i = 0 if near0 else 1
            wi = 0.0j if near0 else 1.0 + 0.0j
            w = z
            prev = abs(w - wi)
            ok = True
            for _ in range(3):
                w = _f_per2(_f_per2(w, c), c)
                d = abs(w - wi)
                if d > 0.75 * prev + 1e-300:
                    ok = False
                    break
                prev = d
            if ok:
                return _K_CYCLE, i, (i + n) & 1, n
        if n >= 12:
            qmax = 48 if n >= 48 else n
            scale = 1.0 + abs(z)
            for q in range(1, qmax + 1):
                cand = ring[(n - q) % 48]
                if abs(z - cand) < 1e-7 * scale:
                    u = z
                    for _ in range(q):
                        u = _f_per2(u, c)
                    d1v = abs(u - z)
                    v = u
                    for _ in range(q):
                        v = _f_per2(v, c)
                    d2v = abs(v - u)
                    if d2v <= 0.7 * d1v + 1e-300 and d2v < 1e-5 * scale:
                        period = q
                        for p in range(1, q):
                            if q % p == 0:
                                w = z
                                for _ in range(p):
                                    w = _f_per2(w, c)
                                if abs(w - z) < 1e-6 * scale:
                                    period = p
                                    break
                        if period == 1:
                            # Newton maps have no attracting fixed points away
                            # from the roots; fold back into a root verdict if
                            # one is adjacent, else ignore the recurrence.
                            best = 0
                            bd = abs(z - roots[0])
                            for k in range(1, 4):
                                d = abs(z - roots[k])
                                if d < bd:
                                    bd = d
                                    best = k
                            if bd < 1e-3 * (1.0 + abs(roots[best])):
                                return _K_ROOT, best, 0, n
                        elif period == 2 and (abs(z) < 1e-3 or abs(z - 1.0) < 1e-3):
                            i = 0 if abs(z) < 1e-3 else 1
                            return _K_CYCLE, i, (i + n) & 1, n
                        elif period >= 2:
                            return _K_OTHER, period, -1, n
        ring[n % 48] = z
        z = _f_per2(z, c)
    return _K_NONE, -1, -1, budget


@njit(cache=True, nogil=True)
def _segment_ok(a, b, kind, idx, phase, c, roots, dr, d0, d1, budget, ns):
    """Check that ns+1 evenly spaced samples of [a, b] share one verdict.

    Returns 1 if every sample absorbs to the expected (kind, index/phase),
    0 on a definite mismatch, 2 if a sample exhausts its budget.
    """
    for s in range(ns + 1):
        t = s / ns
        p = a + (b - a) * t
        k, i, ph, _ = _absorb_quick(p, c, roots, dr, d0, d1, budget)
        if k == _K_NONE:
            return 2
        if k != kind:
            return 0
        if kind == _K_ROOT:
            if i != idx:
                return 0
        else:
            if ph != phase:
                return 0
    return 1


@njit(cache=True, nogil=True)
def _same_component(cpar, kind, idx, phase, roots, dr, d0, d1, budget):
    """Decide whether c lies in the immediate component of its target.

    A point and its target are in one Fatou component exactly when some
    path between them stays inside the basin with constant entry phase.
    Stage one tries the straight segment to the target.  If any sample
    disagrees, stage two walks the forward orbit of c (under f for root
    targets, under f^2 for cycle targets, so the immediate component is
    carried into itself) and tests each consecutive chord; a mismatch on
    a chord whose endpoints straddle two components is detected by the
    interleaved foreign basins between them.  Returns 1 / 0 / 2 with the
    same meaning as _segment_ok.
    """
    if kind == _K_ROOT:
        target = roots[idx]
        delta = dr[idx]
    else:
        target = 0.0j if phase == 0 else 1.0 + 0.0j
        delta = d0 if phase == 0 else d1
    if abs(cpar - target) < delta:
        return 1
    r = _segment_ok(cpar, target, kind, idx, phase, cpar, roots, dr, d0, d1, budget, 24)
    if r == 1:
        return 1
    prev = cpar
    for _ in range(budget):
        nxt = _f_per2(prev, cpar)
        if kind == _K_CYCLE:
            nxt = _f_per2(nxt, cpar)
        r = _segment_ok(prev, nxt, kind, idx, phase, cpar, roots, dr, d0, d1, budget, 8)
        if r != 1:
            return r
        if abs(nxt - target) < delta:
            return 1
        prev = nxt
    return 2


@njit(cache=True, nogil=True)
def classify_parameter(cr, ci, budget, period_guard):
    """Type code of the slice member at c = cr + i ci (one pixel)."""
    c = complex(cr, ci)
    roots = _quartic_roots(-2.0 * c, 0.0j, 4.0 * c - 3.0, 3.0 - 4.0 * c)
    scale = 0.0
    for k in range(4):
        a = abs(roots[k])
        if a > scale:
            scale = a
    for k in range(4):
        for j in range(k + 1, 4):
            if abs(roots[k] - roots[j]) < 1e-6 * (1.0 + scale):
                return MASKED
    dr = np.empty(4, np.float64)
    for k in range(4):
        rk = roots[k]
        near = 1e300
        for j in range(4):
            if j != k:
                d = abs(rk - roots[j])
                if d < near:
                    near = d
        lim = min(min(near, abs(rk)), abs(rk - 1.0))
        lim = min(lim, 2.0 * abs(rk - c))
        dr[k] = max(0.3 * lim, 1e-12)
    lim0 = 1.0
    lim1 = 1.0
    for k in range(4):
        a0 = abs(roots[k])
        a1 = abs(roots[k] - 1.0)
        if a0 < lim0:
            lim0 = a0
        if a1 < lim1:
            lim1 = a1
    d0 = max(0.3 * min(lim0, 2.0 * abs(c)), 1e-12)
    d1 = max(0.3 * min(lim1, 2.0 * abs(c - 1.0)), 1e-12)

    kind, idx, phase, extra = _absorb_full(c, c, roots, dr, d0, d1, budget)
    if kind == _K_NONE:
        return UNRES
    if kind == _K_OTHER:
        if period_guard and idx != 2:
            return UNRES
        return D
    imm = _same_component(c, kind, idx, phase, roots, dr, d0, d1, budget)
    if imm == 2:
        return UNRES
    if kind == _K_ROOT:
        return IE if imm == 1 else FE1
    if imm == 1:
        return A if phase == 0 else B
    return C


@njit(cache=True, nogil=True)
def per2_band(xs, ys, j0, j1, budget, period_guard, out):
    """Classify rows j0..j1-1 of the parameter grid into out."""
    for j in range(j0, j1):
        y = ys[j]
        for i in range(xs.shape[0]):
            out[j, i] = classify_parameter(xs[i], y, budget, period_guard)


@njit(cache=True, nogil=True)
def _eval_poly(co, z):
    v = 0.0j
    for k in range(co.shape[0] - 1, -1, -1):
        v = v * z + co[k]
    return v


@njit(cache=True, nogil=True)
def basin_band(numer, denom, roots, dr, xs, ys, j0, j1, budget, invert,
               out_idx, out_it):
    """Nearest-root basin raster for a general rational Newton map.

    ``numer``/``denom`` are low-order-first coefficient arrays.  With
    ``invert`` nonzero the pixel coordinate w is read in the 1/z chart,
    i.e. the orbit starts at z = 1/w.  out_idx gets the root index or -1,
    out_it the number of steps to absorption.
    """
    nroot = roots.shape[0]
    for j in range(j0, j1):
        y = ys[j]
        for i in range(xs.shape[0]):
            w = complex(xs[i], y)
            if invert != 0:
                if w == 0:
                    out_idx[j, i] = -1
                    out_it[j, i] = 0
                    continue
                z = 1.0 / w
            else:
                z = w
            hit = -1
            steps = budget
            for n in range(budget + 1):
                for k in range(nroot):
                    if abs(z - roots[k]) < dr[k]:
                        hit = k
                        steps = n
                        break
                if hit >= 0:
                    break
                den = _eval_poly(denom, z)
                if den == 0:
                    den = 1e-300 + 0.0j
                nz = _eval_poly(numer, z) / den
                a = abs(nz)
                if a > CAP or a != a:
                    if a != a:
                        nz = complex(CAP, 0.0)
                    else:
                        nz = nz * (CAP / a)
                z = nz
            out_idx[j, i] = hit
            out_it[j, i] = steps
