import math

import numpy as np
import pytest

from polyvol import (
    Ball,
    HPolytope,
    PhaseStarvedError,
    RngStream,
    UnboundedPolytopeError,
    VolumeParams,
    WalkParams,
    ball_sequence,
    ball_volume,
    estimate_volume,
    estimate_with_statistics,
    sample_count,
)
from polyvol.generators import cube, simplex
from polyvol.lp import chebyshev_ball
from polyvol.volume import RunStatistics, estimate_ball_volume, multiphase
from polyvol.walks import sample_points


class TestSampleCount:
    def test_table_values(self):
        assert sample_count(10, 1.0) == 9210
        assert sample_count(20, 1.0) == 23965
        assert sample_count(100, 1.0) == 184206

    def test_epsilon_scaling(self):
        assert sample_count(10, 0.5) == int(4 * 400 * 10 * math.log(10))

    def test_d1(self):
        assert sample_count(1, 1.0) == 400
        assert sample_count(1, 2.0) == 100

    def test_invalid(self):
        with pytest.raises(ValueError):
            sample_count(10, 0.0)
        with pytest.raises(ValueError):
            sample_count(0, 1.0)


class TestBallSequence:
    def test_single_ball(self):
        a, b, radii = ball_sequence(1.0, 1.0, 5)
        assert (a, b) == (0, 0)
        np.testing.assert_array_equal(radii, [1.0])

    def test_cube10(self):
        a, b, radii = ball_sequence(1.0, math.sqrt(10), 10)
        assert (a, b) == (0, 17)
        assert len(radii) == 18

    def test_volume_ratio_two(self):
        _, _, radii = ball_sequence(0.3, 7.0, 6)
        vols = [ball_volume(6, r) for r in radii]
        np.testing.assert_allclose(np.array(vols[1:]) / vols[:-1], 2.0, rtol=1e-12)

    @pytest.mark.parametrize("r,rho,d", [(0.29, 1.0, 2), (1 / 3, 1.4, 9), (2.0, 2.0, 3), (0.5, 0.5, 4)])
    def test_sandwich(self, r, rho, d):
        a, b, radii = ball_sequence(r, rho, d)
        assert radii[0] <= r and radii[-1] >= rho
        assert b >= a

    def test_invalid(self):
        with pytest.raises(ValueError):
            ball_sequence(2.0, 1.0, 3)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            VolumeParams(epsilon=0)
        with pytest.raises(ValueError):
            VolumeParams(rounding=1.0)
        with pytest.raises(ValueError):
            VolumeParams(n_samples=0)


class TestEstimate:
    def test_fields(self):
        est = estimate_volume(cube(3), VolumeParams(seed=1))
        assert est.volume > 0 and est.log_volume == pytest.approx(math.log(est.volume))
        assert est.n_samples == sample_count(3) and est.walk_length == 10
        assert est.beta >= est.alpha
        assert len(est.ratios) == est.beta - est.alpha
        assert all(0 < r <= 1 for r in est.ratios)
        assert est.det_correction == 1.0
        assert est.seed == 1
        assert set(est.to_dict()) >= {"volume", "n_samples", "walk_length", "alpha", "beta",
                                      "ratios", "det_correction", "elapsed", "seed"}

    def test_deterministic(self):
        a = estimate_volume(simplex(4), VolumeParams(seed=5))
        b = estimate_volume(simplex(4), VolumeParams(seed=5))
        assert a.volume == b.volume and a.ratios == b.ratios

    def test_unbounded(self):
        P = HPolytope([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], [1.0, 1.0, 1.0])
        with pytest.raises(UnboundedPolytopeError):
            estimate_volume(P, VolumeParams(seed=0))

    def test_interval(self):
        P = HPolytope([[1.0], [-1.0]], [3.0, 1.0])
        vols = [estimate_volume(P, VolumeParams(seed=s)).volume for s in range(10)]
        assert np.mean(vols) == pytest.approx(4.0, rel=0.05)

    def test_rounding_recorded(self):
        est = estimate_volume(cube(3).scale(4.0), VolumeParams(seed=2, rounding=1.5))
        assert est.rounding_iterations >= 1
        assert est.det_correction != 1.0
        assert est.volume == pytest.approx(8 * 64, rel=0.15)

    def test_membership_oracle(self):
        est = estimate_volume(cube(4), VolumeParams(seed=3, walk=WalkParams(oracle="membership")))
        assert est.volume == pytest.approx(16, rel=0.15)

    def test_scaling_equivariance(self):
        d, s, k = 5, 2.0, 20
        P = cube(d)
        a = np.log([estimate_volume(P, VolumeParams(seed=i)).volume for i in range(k)])
        b = np.log([estimate_volume(P.scale(s), VolumeParams(seed=100 + i)).volume
                    for i in range(k)])
        combined = math.sqrt(a.var(ddof=1) / k + b.var(ddof=1) / k)
        assert abs(b.mean() - a.mean() - d * math.log(s)) <= 3 * combined


class TestPhases:
    def test_samples_in_body_and_ball_and_bookkeeping(self):
        P = simplex(4)
        cb = chebyshev_ball(P)
        Q = P.translate(cb.center)
        rng = RngStream(7)
        n = 2000
        params = WalkParams()
        fresh_batches = []

        def sampler(p, k, radius):
            pts = sample_points(Q, p, k, params, rng, ball=Ball(np.zeros(4), radius))
            fresh_batches.append((radius, pts))
            return pts

        S = sample_points(Q, np.zeros(4), n, params, rng)
        _, alpha, beta, ratios, phases = multiphase(sampler, S, cb.radius, n, 4)
        for radius, pts in fresh_batches:
            assert np.all(pts @ Q.A.T <= Q.b + 1e-9)
            assert np.linalg.norm(pts, axis=1).max() <= radius + 1e-9
        for ph in phases:
            assert ph.retained + ph.walked == n
            assert 0 < ph.count <= n
        assert len(phases) == beta - alpha

    def test_starved(self):
        # a sampler that never lands in the smaller ball
        S = np.array([[0.9, 0.0], [0.0, 0.95]])
        def sampler(p, k, radius):
            return np.tile([radius * 0.999, 0.0], (k, 1))
        with pytest.raises(PhaseStarvedError, match="phase starved"):
            multiphase(sampler, S, 0.1, 2, 2)

    def test_low_ratio_warns(self, caplog):
        S = np.array([[0.0, 0.0]] + [[0.99, 0.0]] * 19)
        def sampler(p, k, radius):
            return np.tile([0.99 * radius, 0.0], (k, 1))
        multiphase(sampler, S, 2 ** -0.5 * 0.99, 20, 2)
        assert "kept only" in caplog.text


class TestPureBall:
    @pytest.mark.parametrize("d,R,r", [(2, 1.0, 0.3), (5, 2.0, 0.5)])
    def test_ball_volume_recovered(self, d, R, r):
        k = 20
        master = RngStream(99)
        vols = np.array([estimate_ball_volume(d, R, r, rng=master.substream(i)).volume
                         for i in range(k)])
        exact = ball_volume(d, R)
        assert abs(vols.mean() - exact) <= 3 * vols.std(ddof=1)
        assert abs(vols.mean() - exact) <= 3 * vols.std(ddof=1) / math.sqrt(k)

    def test_validation(self):
        with pytest.raises(ValueError):
            estimate_ball_volume(3, 1.0, 2.0)


class TestStatistics:
    def test_single_run_degenerate(self):
        st = estimate_with_statistics(cube(2), VolumeParams(seed=1), 1, exact_volume=4.0)
        assert st.k == 1 and st.mean == st.min == st.max and st.std == 0.0 and st.spread == 0.0
        assert st.rel_error == pytest.approx((4.0 - st.mean) / 4.0)

    def test_deterministic_and_parallel_invariant(self):
        p = VolumeParams(seed=17)
        a = estimate_with_statistics(cube(3), p, 4)
        b = estimate_with_statistics(cube(3), p, 4)
        c = estimate_with_statistics(cube(3), p, 4, parallel=3)
        va = [e.volume for e in a.runs]
        assert va == [e.volume for e in b.runs] == [e.volume for e in c.runs]
        assert a.mean == c.mean and a.std == c.std

    def test_substreams_differ(self):
        st = estimate_with_statistics(cube(3), VolumeParams(seed=3), 3)
        assert len({e.volume for e in st.runs}) == 3
        assert [e.stream for e in st.runs] == [(0,), (1,), (2,)]

    def test_invariants(self):
        st = estimate_with_statistics(simplex(3), VolumeParams(seed=4), 5, exact_volume=1 / 6)
        assert st.min <= st.mean <= st.max and st.std >= 0
        vols = [e.volume for e in st.runs]
        assert st.mean == np.mean(vols)
        assert st.spread == pytest.approx((max(vols) - min(vols)) / st.mean)

    def test_failures_recorded(self):
        unb = HPolytope([[1.0, 0.0]], [1.0])
        with pytest.raises(UnboundedPolytopeError):
            estimate_with_statistics(unb, VolumeParams(seed=1), 2)

    def test_partial_failure(self, monkeypatch):
        import polyvol.volume as vol
        real = vol.estimate_volume

        def flaky(P, params, rng):
            if rng.key == (1,):
                raise PhaseStarvedError()
            return real(P, params, rng)

        monkeypatch.setattr(vol, "estimate_volume", flaky)
        st = estimate_with_statistics(cube(2), VolumeParams(seed=1), 3)
        assert st.k == 2
        assert st.failures == [{"repetition": 1, "error": "PhaseStarvedError: phase starved"}]

    def test_requires_repetition(self):
        with pytest.raises(ValueError):
            estimate_with_statistics(cube(2), VolumeParams(seed=1), 0)

    def test_to_dict(self):
        st = RunStatistics.from_estimates([estimate_volume(cube(2), VolumeParams(seed=1))])
        d = st.to_dict()
        assert d["k"] == 1 and len(d["runs"]) == 1 and d["failures"] == []
