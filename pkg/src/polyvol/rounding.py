"""Iterative rounding with approximate minimum-volume enclosing ellipsoids.

Each round samples the current polytope, fits an enclosing ellipsoid
``(x - c)^T E (x - c) <= 1`` by Khachiyan's barycentric ascent, and maps
it to the unit ball with ``y = L^T (x - c)`` where ``E = L L^T``.  The
volume changes by ``det(L^T)``, which is accumulated in
``det_correction``: ``vol(original) = vol(rounded) / det_correction``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import FlatSampleError
from .geometry import AffineMap, Ball, Ellipsoid, HPolytope, cholesky, random_point_in_ball
from .lp import chebyshev_ball
from .rng import RngStream
from .walks import WalkParams, sample_points

log = logging.getLogger(__name__)

MAX_ROUNDS = 10


@dataclass
class KhachiyanResult:
    weights: np.ndarray
    iterations: int
    max_lifted_distance: float
    log_dets: list


def khachiyan_weights(points, eps: float = 0.01, max_iter: int = 100_000,
                      refresh: int = 100) -> KhachiyanResult:
    """Barycentric coordinate ascent for the lifted MVEE problem.

    Works on ``q_i = (x_i, 1)`` with ``X(u) = sum_i u_i q_i q_i^T`` and stops
    once ``max_i q_i^T X^-1 q_i <= (1 + eps)(d + 1)``.  ``X^-1`` and the
    distances are kept current with rank-one updates and recomputed every
    ``refresh`` iterations.  ``log_dets`` records ``log det X`` after each
    iteration, which the ascent never decreases.
    """
    S = np.asarray(points, dtype=float)
    n, d = S.shape
    if n < d + 1 or np.linalg.matrix_rank(S - S.mean(axis=0)) < d:
        raise FlatSampleError()
    Q = np.hstack([S, np.ones((n, 1))])
    D = d + 1
    u = np.full(n, 1.0 / n)
    target = (1.0 + eps) * D

    def rebuild(u):
        X = Q.T @ (u[:, None] * Q)
        Xinv = np.linalg.inv(X)
        M = np.einsum("ij,jk,ik->i", Q, Xinv, Q)
        return X, Xinv, M

    X, Xinv, M = rebuild(u)
    logdet = np.linalg.slogdet(X)[1]
    log_dets = [logdet]
    it = 0
    while it < max_iter:
        j = int(np.argmax(M))
        g = M[j]
        if g <= target:
            break
        step = (g - D) / (D * (g - 1.0))
        q = Q[j]
        Xq = Xinv @ q
        w = Q @ Xq
        denom = (1.0 - step) + step * g
        M = (M - step * w * w / denom) / (1.0 - step)
        Xinv = (Xinv - step * np.outer(Xq, Xq) / denom) / (1.0 - step)
        u *= 1.0 - step
        u[j] += step
        logdet += D * math.log1p(-step) + math.log1p(step * g / (1.0 - step))
        it += 1
        if it % refresh == 0:
            X, Xinv, M = rebuild(u)
            logdet = np.linalg.slogdet(X)[1]
        log_dets.append(logdet)
    return KhachiyanResult(u, it, float(M.max()), log_dets)


def mvee(points, eps: float = 0.01) -> Ellipsoid:
    """Approximate minimum-volume ellipsoid covering ``points``.

    The Khachiyan weights fix the center and shape; the shape is then
    scaled so the farthest point lies exactly on the boundary, which
    makes coverage exact rather than ``(1 + eps)``-approximate.
    """
    S = np.asarray(points, dtype=float)
    u = khachiyan_weights(S, eps).weights
    c = S.T @ u
    cov = S.T @ (u[:, None] * S) - np.outer(c, c)
    try:
        shape = np.linalg.inv(cov)
    except np.linalg.LinAlgError:
        raise FlatSampleError() from None
    shape = 0.5 * (shape + shape.T)
    diff = S - c
    reach = np.einsum("ij,jk,ik->i", diff, shape, diff).max()
    return Ellipsoid(shape / reach, c)


def apply_rounding(P: HPolytope, E: Ellipsoid) -> tuple[HPolytope, float]:
    """Map P through ``y = L^T (x - c)``; returns the image and ``det(L^T)``.

    The image is ``{y | A (L^T)^-1 y <= b - A c}`` and
    ``vol(P) = vol(image) / det(L^T)``.
    """
    L = cholesky(E.E)
    A_new = np.linalg.solve(L, P.A.T).T  # A (L^T)^-1
    b_new = P.b - P.A @ E.center
    return HPolytope(A_new, b_new), float(np.prod(np.diag(L)))


@dataclass
class RoundingResult:
    polytope: HPolytope
    det_correction: float
    iterations: int
    final_axes_ratio: float
    samples: np.ndarray
    converged: bool
    to_original: AffineMap
    last_point: np.ndarray


def iterative_round(P: HPolytope, t_r: float = 1.5, n_samples: int = 1000,
                    params: WalkParams | None = None, rng: RngStream | None = None,
                    start=None, eps: float = 0.01, max_rounds: int = MAX_ROUNDS) -> RoundingResult:
    """Sample, fit an ellipsoid, transform; repeat until the axes ratio drops below ``t_r``.

    The returned ``samples`` are the last round's points mapped into the
    rounded coordinates, so they are (approximately) uniform in the
    returned polytope.  Hitting ``max_rounds`` logs a warning and returns
    the last iterate with ``converged=False``.
    """
    if not t_r > 1.0:
        raise ValueError("rounding threshold must exceed 1")
    params = params or WalkParams()
    rng = rng or RngStream()
    d = P.dim
    if start is None:
        cb = chebyshev_ball(P)
        start = random_point_in_ball(Ball(cb.center, cb.radius), rng)
    p = np.array(start, dtype=float)
    T = np.eye(d)
    offset = np.zeros(d)
    det_corr = 1.0
    cur = P
    ratio = math.inf
    converged = False
    rounds = 0
    S = None
    while rounds < max_rounds:
        rounds += 1
        S = sample_points(cur, p, n_samples, params, rng)
        E = mvee(S, eps)
        ratio = E.axes_ratio()
        L = cholesky(E.E)
        cur, det = apply_rounding(cur, E)
        det_corr *= det
        offset = T @ E.center + offset
        T = np.linalg.solve(L, T.T).T  # T (L^T)^-1
        S = (S - E.center) @ L
        p = S[-1].copy()
        log.debug("rounding round %d: axes ratio %.4g", rounds, ratio)
        if ratio < t_r:
            converged = True
            break
    if not converged:
        log.warning("rounding stopped after %d rounds with axes ratio %.4g >= %.4g",
                    rounds, ratio, t_r)
    return RoundingResult(cur, det_corr, rounds, ratio, S, converged,
                          AffineMap(T, offset), p)
