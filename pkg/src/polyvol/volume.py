"""Multiphase Monte Carlo volume estimation.

Outline of :func:`estimate_volume`:

1. ``N = sample_count(d, epsilon)``, ``W = default_walk_length(d)``.
2. Chebyshev ball ``B(c, r)``; the polytope is translated so ``c = 0``.
3. Optional iterative rounding; afterwards the Chebyshev ball is
   recomputed in the rounded coordinates and the polytope re-centered.
4. ``N`` chained walk points in P (or the rounding sample), ``rho`` their
   largest norm.
5. Balls of radius ``2^(i/d)`` for ``i = alpha .. beta`` with
   ``alpha = floor(d log2 r)``, ``beta = ceil(d log2 rho)``.
6. From the largest ball inwards: keep the samples that fall in the next
   smaller ball, walk in the current body until N points have been seen,
   and multiply the running volume by ``N / count``.
7. Divide by the rounding determinant.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import PhaseStarvedError
from .geometry import Ball, HPolytope, log_ball_volume, random_point_in_ball
from .lp import chebyshev_ball
from .rng import RngStream, entropy_seed
from .rounding import iterative_round
from .walks import WalkParams, sample_points

log = logging.getLogger(__name__)

#: Phase ratios count/N below this are logged as suspicious.
STARVATION_WARNING = 0.1


def sample_count(d: int, epsilon: float = 1.0) -> int:
    """``floor(400 eps^-2 d ln d)``; ``floor(400 eps^-2)`` for d = 1."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d == 1:
        return int(400.0 / epsilon ** 2)
    return int(400.0 / epsilon ** 2 * d * math.log(d))


def ball_sequence(r: float, rho: float, d: int) -> tuple[int, int, np.ndarray]:
    """Phase indices ``alpha, beta`` and radii ``2^(i/d)`` for ``i = alpha..beta``."""
    if not 0 < r <= rho:
        raise ValueError(f"need 0 < r <= rho, got r={r}, rho={rho}")
    alpha = math.floor(d * math.log2(r))
    beta = math.ceil(d * math.log2(rho))
    # guard against rounding in log2 at exact powers of two
    while 2.0 ** (alpha / d) > r:
        alpha -= 1
    while 2.0 ** (beta / d) < rho:
        beta += 1
    radii = 2.0 ** (np.arange(alpha, beta + 1) / d)
    return alpha, beta, radii


@dataclass
class VolumeParams:
    epsilon: float = 1.0
    walk: WalkParams = field(default_factory=WalkParams)
    rounding: float | None = None  # threshold t_r; None disables rounding
    n_samples: int | None = None   # override for N
    seed: int | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.rounding is not None and not self.rounding > 1:
            raise ValueError("rounding threshold must exceed 1")
        if self.n_samples is not None and self.n_samples < 1:
            raise ValueError("sample count must be positive")


@dataclass
class VolumeEstimate:
    volume: float
    log_volume: float
    n_samples: int
    walk_length: int
    walk: str
    alpha: int
    beta: int
    ratios: list
    det_correction: float
    inner_radius: float
    outer_radius: float
    rounding_iterations: int
    elapsed: float
    seed: int | None
    stream: tuple = ()

    def to_dict(self) -> dict:
        out = asdict(self)
        out["stream"] = list(self.stream)
        return out


@dataclass
class PhaseRecord:
    """Bookkeeping of one phase over the body ``P ∩ B(0, radius)``.

    ``retained`` samples of that body are carried over from the previous
    phase and ``walked`` new ones are generated, so the two always sum to
    N.  ``count`` of them fall in the next smaller ball.
    """

    radius: float
    retained: int
    walked: int
    count: int


def multiphase(sampler, samples: np.ndarray, r: float, n: int, d: int):
    """Telescoping product over the balls ``B(0, 2^(i/d))``.

    ``sampler(start, k, radius)`` must return ``k`` chained walk points in
    the body intersected with ``B(0, radius)``.  ``samples`` are ``n``
    points of the body, all within the outermost ball.  Returns
    ``(log_volume, alpha, beta, ratios, phases)``.
    """
    rho = max(float(np.sqrt((samples ** 2).sum(axis=1)).max()), r)
    alpha, beta, radii = ball_sequence(r, rho, d)
    log_vol = log_ball_volume(d, radii[0])
    S = samples
    norms_sq = (S ** 2).sum(axis=1)
    ratios, phases = [], []
    for i in range(beta, alpha, -1):
        large = radii[i - alpha]
        small = radii[i - 1 - alpha]
        count_prev = len(S)
        keep = norms_sq <= small * small
        start = S[keep][0] if keep.any() else S[-1]
        S, norms_sq = S[keep], norms_sq[keep]
        count = len(S)
        walked = n - count_prev
        if walked > 0:
            fresh = sampler(start, walked, large)
            fresh_sq = (fresh ** 2).sum(axis=1)
            inside = fresh_sq <= small * small
            S = np.vstack([S, fresh[inside]])
            norms_sq = np.concatenate([norms_sq, fresh_sq[inside]])
            count += int(inside.sum())
        if count == 0:
            raise PhaseStarvedError(f"phase starved at radius {large:.6g}")
        if count < STARVATION_WARNING * n:
            log.warning("phase at radius %.6g kept only %d of %d points", large, count, n)
        ratios.append(count / n)
        phases.append(PhaseRecord(large, count_prev, max(walked, 0), count))
        log_vol += math.log(n / count)
    return log_vol, alpha, beta, ratios, phases


def estimate_volume(P: HPolytope, params: VolumeParams | None = None,
                    rng: RngStream | None = None) -> VolumeEstimate:
    """Multiphase Monte Carlo estimate of ``vol(P)``."""
    params = params or VolumeParams()
    if rng is None:
        rng = RngStream(params.seed)
    t0 = time.monotonic()
    d = P.dim
    n = params.n_samples or sample_count(d, params.epsilon)
    W = params.walk.length_for(d)

    cb = chebyshev_ball(P)
    Q = P.translate(cb.center)
    r = cb.radius
    det_corr = 1.0
    rounds = 0
    if params.rounding is not None:
        start = random_point_in_ball(Ball(np.zeros(d), r), rng)
        res = iterative_round(Q, params.rounding, n, params.walk, rng, start=start)
        det_corr = res.det_correction
        rounds = res.iterations
        cb = chebyshev_ball(res.polytope)
        Q = res.polytope.translate(cb.center)
        r = cb.radius
        S = res.samples - cb.center
    if params.rounding is None:
        start = random_point_in_ball(Ball(np.zeros(d), r), rng)
        S = sample_points(Q, start, n, params.walk, rng)

    origin = np.zeros(d)

    def sampler(p, k, radius):
        return sample_points(Q, p, k, params.walk, rng, ball=Ball(origin, radius))

    log_vol, alpha, beta, ratios, _ = multiphase(sampler, S, r, n, d)
    rho = float(np.sqrt((S ** 2).sum(axis=1)).max())
    log_vol -= math.log(det_corr)
    return VolumeEstimate(
        volume=math.exp(log_vol), log_volume=log_vol, n_samples=n, walk_length=W,
        walk=params.walk.variant, alpha=alpha, beta=beta, ratios=ratios,
        det_correction=det_corr, inner_radius=r, outer_radius=max(rho, r),
        rounding_iterations=rounds, elapsed=time.monotonic() - t0,
        seed=rng.seed, stream=rng.key)


def estimate_ball_volume(d: int, radius: float, inner_radius: float,
                         params: VolumeParams | None = None,
                         rng: RngStream | None = None) -> VolumeEstimate:
    """Run the multiphase scheme on the ball ``B(0, radius)`` itself.

    The body has no facets, so every chord comes from the sphere alone and
    each phase ratio is a pure ball-in-ball Bernoulli.  ``inner_radius``
    plays the role of the Chebyshev radius and sets how many phases run.
    """
    params = params or VolumeParams()
    if rng is None:
        rng = RngStream(params.seed)
    if not 0 < inner_radius <= radius:
        raise ValueError("need 0 < inner_radius <= radius")
    t0 = time.monotonic()
    n = params.n_samples or sample_count(d, params.epsilon)
    W = params.walk.length_for(d)
    empty = _EmptyPolytope(d)
    origin = np.zeros(d)

    def sampler(p, k, rad):
        return sample_points(empty, p, k, params.walk, rng, ball=Ball(origin, min(rad, radius)))

    start = random_point_in_ball(Ball(origin, inner_radius), rng)
    S = sampler(start, n, radius)
    log_vol, alpha, beta, ratios, _ = multiphase(sampler, S, inner_radius, n, d)
    rho = float(np.sqrt((S ** 2).sum(axis=1)).max())
    return VolumeEstimate(
        volume=math.exp(log_vol), log_volume=log_vol, n_samples=n, walk_length=W,
        walk=params.walk.variant, alpha=alpha, beta=beta, ratios=ratios,
        det_correction=1.0, inner_radius=inner_radius, outer_radius=rho,
        rounding_iterations=0, elapsed=time.monotonic() - t0, seed=rng.seed, stream=rng.key)


class _EmptyPolytope:
    """Stand-in with zero facets, so walks are bounded by their ball only."""

    def __init__(self, d):
        self.A = np.zeros((0, d))
        self.b = np.zeros(0)
        self.dim = d


@dataclass
class RunStatistics:
    k: int
    mean: float
    min: float
    max: float
    std: float
    spread: float
    exact_volume: float | None = None
    rel_error: float | None = None
    runs: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    seed: int | None = None
    elapsed: float = 0.0

    @classmethod
    def from_estimates(cls, estimates, exact_volume=None, failures=(), seed=None):
        vols = np.array([e.volume for e in estimates], dtype=float)
        mean = float(vols.mean())
        std = float(vols.std(ddof=1)) if len(vols) > 1 else 0.0
        rel = None if exact_volume is None else (exact_volume - mean) / exact_volume
        return cls(k=len(vols), mean=mean, min=float(vols.min()), max=float(vols.max()),
                   std=std, spread=float((vols.max() - vols.min()) / mean),
                   exact_volume=exact_volume, rel_error=rel, runs=list(estimates),
                   failures=list(failures), seed=seed,
                   elapsed=float(sum(e.elapsed for e in estimates)))

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k not in ("runs", "failures")}
        out["runs"] = [e.to_dict() for e in self.runs]
        out["failures"] = [dict(f) for f in self.failures]
        return out


def estimate_with_statistics(P: HPolytope, params: VolumeParams | None = None,
                             repetitions: int = 1, exact_volume: float | None = None,
                             parallel: int = 1) -> RunStatistics:
    """Run ``repetitions`` independent estimates and summarize them.

    Repetition ``i`` uses substream ``i`` of the master seed, so the
    outcome does not depend on ``parallel``.  Failed runs are recorded and
    excluded; if every run fails the first error is raised.
    """
    params = params or VolumeParams()
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    seed = params.seed if params.seed is not None else entropy_seed()
    master = RngStream(seed)

    def run(i):
        try:
            return estimate_volume(P, params, master.substream(i)), None
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            return None, exc

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(run, range(repetitions)))
    else:
        results = [run(i) for i in range(repetitions)]
    estimates = [e for e, _ in results if e is not None]
    failures = [{"repetition": i, "error": f"{type(exc).__name__}: {exc}"}
                for i, (_, exc) in enumerate(results) if exc is not None]
    if not estimates:
        raise next(exc for _, exc in results if exc is not None)
    return RunStatistics.from_estimates(estimates, exact_volume, failures, seed)
