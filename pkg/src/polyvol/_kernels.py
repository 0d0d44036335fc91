"""Compiled Hit-and-run chains.

These are the hot loops behind :func:`polyvol.walks.sample_points`.  They
implement the same oracles as :mod:`polyvol.oracles` but work on raw
arrays and take all randomness as pre-drawn arrays, so a chain is a pure
function of its inputs.  The ball (if any) is centered at the origin;
``radius = inf`` means no ball.

Status codes: 0 ok, 1 unbounded chord.
"""

import math

import numpy as np
from numba import njit

PARALLEL_TOL = 1e-12
DRIFT_TOL = 1e-6
DEGENERATE_CHORD = 1e-12
INSIDE_TOL = 1e-9


@njit(cache=True, nogil=True, inline="always")
def _clip(lower, upper, half_b, c):
    # chord of lam^2 + 2 half_b lam + c <= 0 intersected with [lower, upper]
    if math.isfinite(lower) and math.isfinite(upper):
        if lower * lower + 2.0 * lower * half_b + c < 0.0 and \
                upper * upper + 2.0 * upper * half_b + c < 0.0:
            return lower, upper
    disc = half_b * half_b - c
    if disc < 0.0:
        disc = 0.0
    sq = math.sqrt(disc)
    r1 = -(half_b + math.copysign(sq, half_b))
    r2 = 0.0 if r1 == 0.0 else c / r1
    lo = min(r1, r2)
    hi = max(r1, r2)
    return max(lower, lo), min(upper, hi)


@njit(cache=True, nogil=True)
def _fresh_slack(A, b, p, t):
    m, d = A.shape
    for i in range(m):
        s = b[i]
        for j in range(d):
            s -= A[i, j] * p[j]
        t[i] = s


@njit(cache=True, nogil=True)
def cdhr_chain(A, AT, b, p, radius, W, coords, uniforms, out):
    """Coordinate-direction chain with the amortized O(m) oracle.

    ``p`` is updated in place; ``out[i]`` receives the point after
    ``(i + 1) * W`` steps.
    """
    m, d = A.shape
    t = np.empty(m)
    _fresh_slack(A, b, p, t)
    norm_sq = 0.0
    for j in range(d):
        norm_sq += p[j] * p[j]
    r_sq = radius * radius
    refresh = 10 * d
    since = 0
    s = 0
    for i in range(out.shape[0]):
        for _ in range(W):
            k = coords[s]
            u = uniforms[s]
            s += 1
            col = AT[k]
            lower = -np.inf
            upper = np.inf
            for r in range(m):
                a = col[r]
                if a > PARALLEL_TOL:
                    v = t[r] / a
                    if v < upper:
                        upper = v
                elif a < -PARALLEL_TOL:
                    v = t[r] / a
                    if v > lower:
                        lower = v
            if lower > 0.0:
                lower = 0.0
            if upper < 0.0:
                upper = 0.0
            if math.isfinite(radius):
                lower, upper = _clip(lower, upper, p[k], norm_sq - r_sq)
            if not (math.isfinite(lower) and math.isfinite(upper)):
                return 1
            tmin = np.inf
            if upper - lower > DEGENERATE_CHORD:
                lam = lower + u * (upper - lower)
                old = p[k]
                p[k] = old + lam
                norm_sq += 2.0 * lam * old + lam * lam
                for r in range(m):
                    t[r] -= lam * col[r]
                    if t[r] < tmin:
                        tmin = t[r]
            since += 1
            if since >= refresh or tmin < -DRIFT_TOL:
                _fresh_slack(A, b, p, t)
                norm_sq = 0.0
                for j in range(d):
                    norm_sq += p[j] * p[j]
                since = 0
        out[i, :] = p
    return 0


@njit(cache=True, nogil=True)
def rdhr_chain(A, b, p, radius, W, normals, uniforms, out):
    """Random-direction chain; every step scans all facets, O(md)."""
    m, d = A.shape
    t = np.empty(m)
    Av = np.empty(m)
    v = np.empty(d)
    r_sq = radius * radius
    s = 0
    for i in range(out.shape[0]):
        for _ in range(W):
            nrm = 0.0
            for j in range(d):
                v[j] = normals[s, j]
                nrm += v[j] * v[j]
            nrm = math.sqrt(nrm)
            half_b = 0.0
            norm_sq = 0.0
            for j in range(d):
                v[j] /= nrm
                half_b += p[j] * v[j]
                norm_sq += p[j] * p[j]
            u = uniforms[s]
            s += 1
            lower = -np.inf
            upper = np.inf
            for r in range(m):
                tr = b[r]
                ar = 0.0
                for j in range(d):
                    tr -= A[r, j] * p[j]
                    ar += A[r, j] * v[j]
                if ar > PARALLEL_TOL:
                    x = tr / ar
                    if x < upper:
                        upper = x
                elif ar < -PARALLEL_TOL:
                    x = tr / ar
                    if x > lower:
                        lower = x
            if lower > 0.0:
                lower = 0.0
            if upper < 0.0:
                upper = 0.0
            if math.isfinite(radius):
                lower, upper = _clip(lower, upper, half_b, norm_sq - r_sq)
            if not (math.isfinite(lower) and math.isfinite(upper)):
                return 1
            if upper - lower > DEGENERATE_CHORD:
                lam = lower + u * (upper - lower)
                for j in range(d):
                    p[j] += lam * v[j]
        out[i, :] = p
    return 0


@njit(cache=True, nogil=True, inline="always")
def _line_inside(t, Av, lam):
    for r in range(t.shape[0]):
        if t[r] - lam * Av[r] < -INSIDE_TOL:
            return False
    return True


@njit(cache=True, nogil=True, inline="always")
def _bisect(t, Av, hi, eps_s):
    if _line_inside(t, Av, hi):
        return hi
    lo = 0.0
    while abs(hi - lo) > eps_s:
        mid = 0.5 * (lo + hi)
        if _line_inside(t, Av, mid):
            lo = mid
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def membership_chain(A, b, p, radius, W, coordinate, coords, normals, uniforms, eps_s, out):
    """Chain whose chords come from bisection on membership tests.

    ``radius`` must be finite: it bounds the search.  Directions are axes
    (``coordinate=True``, drawn from ``coords``) or normalized ``normals``.
    ``A p0`` and ``A v`` are cached per line, so each membership test
    costs O(m).
    """
    m, d = A.shape
    t = np.empty(m)
    Av = np.empty(m)
    v = np.zeros(d)
    r_sq = radius * radius
    s = 0
    for i in range(out.shape[0]):
        for _ in range(W):
            if coordinate:
                v[:] = 0.0
                v[coords[s]] = 1.0
            else:
                nrm = 0.0
                for j in range(d):
                    v[j] = normals[s, j]
                    nrm += v[j] * v[j]
                nrm = math.sqrt(nrm)
                for j in range(d):
                    v[j] /= nrm
            u = uniforms[s]
            s += 1
            half_b = 0.0
            norm_sq = 0.0
            for j in range(d):
                half_b += p[j] * v[j]
                norm_sq += p[j] * p[j]
            for r in range(m):
                tr = b[r]
                ar = 0.0
                for j in range(d):
                    tr -= A[r, j] * p[j]
                    ar += A[r, j] * v[j]
                t[r] = tr
                Av[r] = ar
            lo_b, hi_b = _clip(-np.inf, np.inf, half_b, norm_sq - r_sq)
            upper = _bisect(t, Av, hi_b, eps_s)
            lower = _bisect(t, Av, lo_b, eps_s)
            if lower > 0.0:
                lower = 0.0
            if upper < 0.0:
                upper = 0.0
            if upper - lower > DEGENERATE_CHORD:
                lam = lower + u * (upper - lower)
                for j in range(d):
                    p[j] += lam * v[j]
        out[i, :] = p
    return 0
