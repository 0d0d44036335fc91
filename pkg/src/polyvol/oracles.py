"""Boundary oracles: where does the line ``p0 + lam * v`` leave the body?

Three routes are provided:

* facet intersection, a full O(md) scan of the hyperplanes;
* the coordinate-direction variant, which caches the slack vector
  ``t = b - A p`` so each further step along an axis costs O(m);
* bisection against a membership predicate, for bodies known only
  through membership (and to cross-check the other two).

:func:`clip_with_ball` intersects a chord with the current ball of the
multiphase scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import StateDriftError, UnboundedDirectionError
from .geometry import INSIDE_TOL, Ball, HPolytope

#: Rows with ``|a_i . v|`` at or below this are treated as parallel to the line.
PARALLEL_TOL = 1e-12
DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class Chord:
    """Parameter interval ``[lower, upper]`` of the line inside the body.

    ``iterations`` is only filled by :func:`chord_membership` and counts
    the bisection steps of the longer side.
    """

    lower: float
    upper: float
    iterations: int = 0

    @property
    def length(self) -> float:
        return self.upper - self.lower


def ratio_bounds(t, Av):
    """min/max of ``t_i / Av_i`` over rows with positive/negative ``Av_i``."""
    pos = Av > PARALLEL_TOL
    neg = Av < -PARALLEL_TOL
    upper = np.min(t[pos] / Av[pos]) if pos.any() else math.inf
    lower = np.max(t[neg] / Av[neg]) if neg.any() else -math.inf
    return min(float(lower), 0.0), max(float(upper), 0.0)


def _require_bounded(lower, upper):
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise UnboundedDirectionError()


def chord_facets(P: HPolytope, p0, v) -> Chord:
    """Chord of the line through ``p0`` with unit direction ``v`` by scanning all facets."""
    p0 = np.asarray(p0, dtype=float)
    v = np.asarray(v, dtype=float)
    lower, upper = ratio_bounds(P.b - P.A @ p0, P.A @ v)
    _require_bounded(lower, upper)
    return Chord(lower, upper)


@dataclass(frozen=True)
class WalkState:
    """Current point of a coordinate walk with its cached slack vector."""

    point: np.ndarray
    slack: np.ndarray
    last_coord: int | None = None
    ball_norm_sq: float | None = None
    steps_since_refresh: int = 0

    @classmethod
    def fresh(cls, P: HPolytope, p, ball: Ball | None = None) -> "WalkState":
        p = np.array(p, dtype=float)
        norm_sq = None if ball is None else float(np.sum((p - ball.center) ** 2))
        return cls(p, P.b - P.A @ p, None, norm_sq, 0)

    def move(self, P: HPolytope, k: int, c: float, ball: Ball | None = None) -> "WalkState":
        """State after displacing the point by ``c`` along axis ``k``, in O(m)."""
        p = self.point.copy()
        old = p[k]
        p[k] = old + c
        t = self.slack - c * P.A[:, k]
        norm_sq = self.ball_norm_sq
        if norm_sq is not None and ball is not None:
            norm_sq = norm_sq + 2.0 * c * (old - ball.center[k]) + c * c
        return WalkState(p, t, k, norm_sq, self.steps_since_refresh + 1)


def coordinate_chord(P: HPolytope, state: WalkState, k: int, bounded: bool = True) -> Chord:
    """Chord along axis ``k`` from the cached slack, O(m)."""
    lower, upper = ratio_bounds(state.slack, P.A[:, k])
    if bounded:
        _require_bounded(lower, upper)
    return Chord(lower, upper)


def chord_cdhr_init(P: HPolytope, p0, k: int) -> tuple[Chord, WalkState]:
    """Chord along axis ``k`` from a freshly computed slack vector."""
    if not 0 <= k < P.dim:
        raise IndexError(f"coordinate {k} out of range for dimension {P.dim}")
    state = WalkState.fresh(P, p0)
    chord = coordinate_chord(P, state, k)
    return chord, replace(state, last_coord=k)


def chord_cdhr_step(P: HPolytope, state: WalkState, c: float, k: int) -> tuple[Chord, WalkState]:
    """Apply the move ``c`` along ``state.last_coord`` and return the chord along ``k``.

    Uses the update ``t <- t - c * A[:, last]`` instead of recomputing
    ``b - A p``.  Raises :class:`StateDriftError` when the updated slack
    has gone below ``-DRIFT_TOL``; callers should then start over with
    :func:`chord_cdhr_init`.
    """
    if state.last_coord is None:
        raise ValueError("state has no previous coordinate; use chord_cdhr_init")
    new = state.move(P, state.last_coord, c)
    if new.slack.min() < -DRIFT_TOL:
        raise StateDriftError()
    chord = coordinate_chord(P, new, k)
    return chord, replace(new, last_coord=k)


def ball_line_roots(p0, v, ball: Ball) -> tuple[float, float]:
    """Roots of ``|p0 + lam v - center|^2 = R^2`` for unit ``v``, ascending."""
    q = np.asarray(p0, dtype=float) - ball.center
    half_b = float(q @ v)
    c = float(q @ q) - ball.radius ** 2
    return _stable_roots(half_b, c)


def _stable_roots(half_b: float, c: float) -> tuple[float, float]:
    # lam^2 + 2 half_b lam + c = 0
    disc = half_b * half_b - c
    assert disc >= -1e-12 * max(1.0, abs(c)), "line misses the ball"
    sq = math.sqrt(max(disc, 0.0))
    r1 = -(half_b + math.copysign(sq, half_b))
    if r1 == 0.0:
        return 0.0, 0.0
    r2 = c / r1
    return (r1, r2) if r1 <= r2 else (r2, r1)


def clip_quadratic(chord: Chord, half_b: float, c: float) -> Chord:
    """Intersect a chord with ``{lam | lam^2 + 2 half_b lam + c <= 0}``.

    If both chord endpoints already make the quadratic negative the chord
    is returned unchanged and no roots are computed.
    """
    def f(lam):
        return lam * lam + 2.0 * lam * half_b + c

    if math.isfinite(chord.lower) and math.isfinite(chord.upper) \
            and f(chord.lower) < 0.0 and f(chord.upper) < 0.0:
        return chord
    lo, hi = _stable_roots(half_b, c)
    return Chord(max(chord.lower, lo), min(chord.upper, hi))


def clip_with_ball(chord: Chord, p0, v, ball: Ball) -> Chord:
    """Intersect a chord with the ball; ``p0`` must lie inside the ball."""
    q = np.asarray(p0, dtype=float) - ball.center
    v = np.asarray(v, dtype=float)
    return clip_quadratic(chord, float(q @ v), float(q @ q) - ball.radius ** 2)


class _LineMembership:
    """Membership along a fixed line in an H-polytope.

    ``A p0`` and ``A v`` are computed once, so each later test of
    ``p0 + lam v`` costs O(1) per hyperplane.
    """

    def __init__(self, P: HPolytope, p0, v):
        self.t = P.b - P.A @ p0
        self.Av = P.A @ v

    def __call__(self, lam: float) -> bool:
        return bool(np.min(self.t - lam * self.Av) >= -INSIDE_TOL)


def _bisect(inside, hi: float, eps_s: float) -> tuple[float, int]:
    """Largest parameter in [0, hi] (or [hi, 0]) known inside, to within eps_s."""
    if inside(hi):
        return hi, 0
    lo, steps = 0.0, 0
    while abs(hi - lo) > eps_s:
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
        steps += 1
    return lo, steps


def chord_membership(body, ball: Ball, p0, v, eps_s: float = 1e-6) -> Chord:
    """Chord of ``body`` (clipped to ``ball``) located by bisection.

    ``body`` is either an :class:`HPolytope` or a predicate ``point -> bool``.
    Both endpoints are returned on the inside, within ``eps_s`` of the
    boundary.
    """
    if eps_s <= 0:
        raise ValueError("eps_s must be positive")
    p0 = np.asarray(p0, dtype=float)
    v = np.asarray(v, dtype=float)
    if isinstance(body, HPolytope):
        inside = _LineMembership(body, p0, v)
    else:
        def inside(lam):
            return bool(body(p0 + lam * v))
    if not inside(0.0):
        raise ValueError("p0 is not inside the body")
    lo_b, hi_b = ball_line_roots(p0, v, ball)
    upper, n_up = _bisect(inside, hi_b, eps_s)
    lower, n_lo = _bisect(inside, lo_b, eps_s)
    return Chord(min(lower, 0.0), max(upper, 0.0), max(n_up, n_lo))
