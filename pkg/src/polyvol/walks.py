"""Hit-and-run random walks over a polytope, optionally intersected with a ball.

The step functions (:func:`rdhr_step`, :func:`cdhr_step`, :func:`walk`)
are plain Python built on :mod:`polyvol.oracles`.  Bulk sampling for the
volume estimator goes through :func:`sample_points`, which runs the same
chains in compiled form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import UnboundedDirectionError
from .geometry import Ball, HPolytope
from .lp import bounding_box
from .oracles import (
    DRIFT_TOL,
    Chord,
    WalkState,
    chord_facets,
    chord_membership,
    clip_quadratic,
    clip_with_ball,
    coordinate_chord,
    ratio_bounds,
)
from .rng import RngStream

CDHR = "cdhr"
RDHR = "rdhr"
VARIANTS = (CDHR, RDHR)
ORACLES = ("facet", "membership")

#: Chords shorter than this leave the point where it is.
DEGENERATE_CHORD = 1e-12

_CHUNK = 2048


def default_walk_length(d: int) -> int:
    """``floor(10 + d / 10)``."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return int(10 + d // 10)


@dataclass(frozen=True)
class WalkParams:
    variant: str = CDHR
    walk_length: int | None = None  # None -> default_walk_length(d)
    oracle: str = "facet"
    eps_s: float = 1e-6

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown walk variant {self.variant!r}")
        if self.oracle not in ORACLES:
            raise ValueError(f"unknown boundary oracle {self.oracle!r}")
        if self.walk_length is not None and self.walk_length < 1:
            raise ValueError("walk length must be >= 1")

    def length_for(self, d: int) -> int:
        return self.walk_length if self.walk_length is not None else default_walk_length(d)


def _pick(chord: Chord, u: float) -> float:
    if chord.length < DEGENERATE_CHORD:
        return 0.0
    return chord.lower + u * chord.length


def rdhr_step(P: HPolytope, p, rng: RngStream, ball: Ball | None = None) -> np.ndarray:
    """One random-direction Hit-and-run step from ``p``."""
    p = np.asarray(p, dtype=float)
    v = rng.normal(P.dim)
    v /= np.linalg.norm(v)
    if ball is None:
        chord = chord_facets(P, p, v)
    else:
        chord = clip_with_ball(Chord(*ratio_bounds(P.b - P.A @ p, P.A @ v)), p, v, ball)
    return p + _pick(chord, rng.uniform()) * v


def cdhr_step(P: HPolytope, state: WalkState, rng: RngStream,
              ball: Ball | None = None) -> WalkState:
    """One coordinate-direction step using the cached slack of ``state``.

    The slack is recomputed from scratch every ``10 d`` steps and whenever
    it drifts below ``-1e-6``.
    """
    d = P.dim
    if ball is not None and state.ball_norm_sq is None:
        state = replace(state, ball_norm_sq=float(np.sum((state.point - ball.center) ** 2)))
    k = int(rng.integers(d))
    chord = coordinate_chord(P, state, k, bounded=ball is None)
    if ball is not None:
        # only coordinate k moves, so the quadratic comes from the cached norm in O(1)
        half_b = float(state.point[k] - ball.center[k])
        chord = clip_quadratic(chord, half_b, state.ball_norm_sq - ball.radius ** 2)
    lam = _pick(chord, rng.uniform())
    if lam != 0.0:
        new = state.move(P, k, lam, ball)
    else:
        new = replace(state, last_coord=k, steps_since_refresh=state.steps_since_refresh + 1)
    if new.steps_since_refresh >= 10 * d or new.slack.min() < -DRIFT_TOL:
        new = replace(WalkState.fresh(P, new.point, ball), last_coord=k)
    return new


def walk(P: HPolytope, p, params: WalkParams, rng: RngStream,
         ball: Ball | None = None) -> np.ndarray:
    """Apply ``W`` steps of the chosen variant starting at ``p``; return the endpoint."""
    W = params.length_for(P.dim)
    if params.variant == RDHR:
        p = np.asarray(p, dtype=float)
        for _ in range(W):
            p = rdhr_step(P, p, rng, ball)
        return p
    state = WalkState.fresh(P, p, ball)
    for _ in range(W):
        state = cdhr_step(P, state, rng, ball)
    return state.point


def membership_step(P: HPolytope, p, rng: RngStream, ball: Ball, coordinate: bool,
                    eps_s: float = 1e-6) -> np.ndarray:
    """One step whose chord is found by bisection; ``ball`` bounds the search."""
    p = np.asarray(p, dtype=float)
    if coordinate:
        v = np.zeros(P.dim)
        v[rng.integers(P.dim)] = 1.0
    else:
        v = rng.normal(P.dim)
        v /= np.linalg.norm(v)
    chord = chord_membership(P, ball, p, v, eps_s)
    return p + _pick(chord, rng.uniform()) * v


def sample_points(P: HPolytope, start, n: int, params: WalkParams, rng: RngStream,
                  ball: Ball | None = None, bounding_radius: float | None = None) -> np.ndarray:
    """Run one chain from ``start`` and return the ``n`` points it visits every W steps.

    The chain lives in ``P`` (intersected with ``ball`` when given).  The
    membership oracle needs a finite search radius: the ball, or else
    ``bounding_radius`` around the ball center / origin.
    """
    d = P.dim
    W = params.length_for(d)
    center = np.zeros(d) if ball is None else ball.center
    radius = math.inf if ball is None else ball.radius
    A = np.ascontiguousarray(P.A)
    b = np.ascontiguousarray(P.b - P.A @ center)
    p = np.array(start, dtype=float) - center
    out = np.empty((n, d))
    coordinate = params.variant == CDHR
    if params.oracle == "membership":
        if not math.isfinite(radius):
            if bounding_radius is None:
                lo, hi = bounding_box(HPolytope(A, b))
                bounding_radius = np.linalg.norm(np.maximum(-lo, hi))
            radius = float(bounding_radius)
    AT = np.ascontiguousarray(A.T)
    for lo in range(0, n, _CHUNK):
        hi = min(n, lo + _CHUNK)
        steps = (hi - lo) * W
        block = out[lo:hi]
        if params.oracle == "membership":
            if coordinate:
                coords = rng.integers(d, size=steps)
                normals = np.empty((0, d))
            else:
                coords = np.empty(0, dtype=np.int64)
                normals = rng.normal((steps, d))
            uniforms = rng.uniform(steps)
            status = _kernels.membership_chain(A, b, p, radius, W, coordinate, coords,
                                               normals, uniforms, params.eps_s, block)
        elif coordinate:
            coords = rng.integers(d, size=steps)
            uniforms = rng.uniform(steps)
            status = _kernels.cdhr_chain(A, AT, b, p, radius, W, coords, uniforms, block)
        else:
            normals = rng.normal((steps, d))
            uniforms = rng.uniform(steps)
            status = _kernels.rdhr_chain(A, b, p, radius, W, normals, uniforms, block)
        if status == 1:
            raise UnboundedDirectionError()
    out += center
    return out

