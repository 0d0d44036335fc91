import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyvol import (
    Ball,
    DimensionMismatchError,
    Ellipsoid,
    EmptyPolytopeError,
    HPolytope,
    NotPositiveDefiniteError,
    PolytopeError,
    RngStream,
    ball_volume,
    check_bounded,
    log_ball_volume,
    reduce_to_full_dimension,
)
from polyvol.generators import cube, random_tangent
from polyvol.geometry import INSIDE_TOL, cholesky, random_point_in_ball


class TestHPolytope:
    def test_contains(self, cube2):
        assert cube2.contains([0, 0])
        assert not cube2.contains([1.5, 0])
        assert cube2.contains([1, 1])

    def test_contains_tolerance(self, cube2):
        assert cube2.contains([1 + 0.5 * INSIDE_TOL, 0])
        assert not cube2.contains([1 + 2 * INSIDE_TOL, 0])

    def test_slack(self, cube2, delta2):
        np.testing.assert_array_equal(cube2.slack([0, 0]), [1, 1, 1, 1])
        s = cube2.slack([1, 0])
        assert s[0] == 0.0
        np.testing.assert_allclose(delta2.slack([0.25, 0.25]), [0.25, 0.25, 0.5])

    def test_dimension_mismatch(self, cube2):
        with pytest.raises(DimensionMismatchError):
            cube2.contains([0, 0, 0])
        with pytest.raises(DimensionMismatchError):
            cube2.slack([0])
        with pytest.raises(DimensionMismatchError):
            HPolytope(np.eye(2), np.ones(3))

    def test_rejects_zero_row(self):
        with pytest.raises(PolytopeError):
            HPolytope([[1.0, 0.0], [0.0, 0.0]], [1.0, 1.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(PolytopeError):
            HPolytope([[1.0, np.nan]], [1.0])

    def test_immutable(self, cube2):
        with pytest.raises(ValueError):
            cube2.A[0, 0] = 3.0

    def test_translate_and_scale(self, cube2):
        Q = cube2.translate([1.0, 0.0])  # P - (1, 0)
        assert Q.contains([-2.0, 0.0]) and not Q.contains([0.5, 0.0])
        S = cube2.scale(3.0)
        assert S.contains([2.9, -2.9]) and not S.contains([3.1, 0])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
    def test_contains_iff_slack(self, p):
        P = cube(2)
        assert P.contains(p) == (P.slack(p).min() >= -INSIDE_TOL)


class TestBallEllipsoid:
    def test_ball_radius_positive(self):
        with pytest.raises(ValueError):
            Ball(np.zeros(2), 0.0)

    def test_ellipsoid_checks(self):
        with pytest.raises(ValueError):
            Ellipsoid([[1.0, 0.5], [0.0, 1.0]], [0, 0])
        with pytest.raises(NotPositiveDefiniteError):
            Ellipsoid([[1.0, 0.0], [0.0, -1.0]], [0, 0])

    def test_axes(self):
        E = Ellipsoid(np.diag([0.25, 1.0]), [0, 0])
        np.testing.assert_allclose(sorted(E.axes()), [1.0, 2.0])
        assert E.axes_ratio() == pytest.approx(2.0)


class TestCholesky:
    def test_examples(self):
        np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))
        np.testing.assert_allclose(cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
        L = cholesky(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(L, [[math.sqrt(2), 0], [1 / math.sqrt(2), math.sqrt(1.5)]])

    def test_not_pd(self):
        with pytest.raises(NotPositiveDefiniteError, match="not positive definite"):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    @pytest.mark.parametrize("d", [1, 5, 20, 50])
    def test_reconstruction(self, d):
        G = np.random.default_rng(d).normal(size=(d, d))
        M = G @ G.T + d * np.eye(d)
        L = cholesky(M)
        assert np.allclose(L, np.tril(L))
        assert np.abs(L @ L.T - M).max() <= 1e-9 * np.abs(M).max()


class TestBallVolume:
    def test_examples(self):
        assert ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
        assert ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)
        assert ball_volume(10) == pytest.approx(math.pi ** 5 / 120, rel=1e-13)
        assert ball_volume(10) == pytest.approx(2.55016, rel=1e-5)

    @pytest.mark.parametrize("d", range(3, 60))
    def test_recurrence(self, d):
        r = 1.3
        assert ball_volume(d, r) == pytest.approx(ball_volume(d - 2, r) * 2 * math.pi * r * r / d,
                                                  rel=1e-12)

    def test_large_d_no_overflow(self):
        assert math.isfinite(log_ball_volume(500, 10.0))


class TestRandomPointInBall:
    def test_containment_and_area(self):
        rng = RngStream(3)
        B = Ball(np.array([1.0, -2.0]), 2.0)
        pts = np.array([random_point_in_ball(B, rng) for _ in range(100_000)])
        dist = np.linalg.norm(pts - B.center, axis=1)
        assert dist.max() <= 2.0
        assert abs(np.mean(dist <= 1.0) - 0.25) <= 0.01

    @pytest.mark.parametrize("d", [3, 7])
    def test_radial_cdf(self, d):
        rng = RngStream(d)
        B = Ball(np.zeros(d), 1.0)
        n = 100_000
        r = np.linalg.norm([random_point_in_ball(B, rng) for _ in range(n)], axis=1)
        for q in (0.5, 0.8, 0.95):
            p = q ** d
            assert abs(np.mean(r <= q) - p) <= 3 * math.sqrt(p * (1 - p) / n)

    def test_deterministic(self):
        B = Ball(np.zeros(4), 1.0)
        a = random_point_in_ball(B, RngStream(9))
        b = random_point_in_ball(B, RngStream(9))
        np.testing.assert_array_equal(a, b)


class TestCheckBounded:
    def test_cube(self):
        assert check_bounded(cube(3))

    def test_halfspace(self):
        assert not check_bounded(HPolytope([[1.0, 0.0]], [0.0]))

    def test_random_tangent(self):
        assert check_bounded(random_tangent(5, 20, RngStream(1)))

    def test_empty(self):
        with pytest.raises(EmptyPolytopeError, match="empty polytope"):
            check_bounded(HPolytope([[1.0], [-1.0]], [-1.0, -1.0]))


class TestReduce:
    def test_birkhoff_2(self):
        Aeq = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
        red = reduce_to_full_dimension(Aeq, np.ones(4), pivot_order=[1, 2, 3])
        assert red.polytope.dim == 1
        assert red.free_vars == (0,)
        # the interval 0 <= t <= 1
        assert red.polytope.contains([0.0]) and red.polytope.contains([1.0])
        assert not red.polytope.contains([1.01]) and not red.polytope.contains([-0.01])
        np.testing.assert_allclose(red.lift([0.3]), [0.3, 0.7, 0.7, 0.3])

    def test_single_equation_segment(self):
        red = reduce_to_full_dimension([[1.0, 1.0]], [1.0])
        P = red.polytope
        assert P.dim == 1
        assert P.contains([0.0]) and P.contains([1.0]) and not P.contains([1.5])

    def test_inconsistent(self):
        with pytest.raises(PolytopeError, match="inconsistent"):
            reduce_to_full_dimension([[1.0, 1.0], [2.0, 2.0]], [1.0, 3.0])

    def test_zero_dimensional(self):
        with pytest.raises(PolytopeError, match="zero-dimensional"):
            reduce_to_full_dimension(np.eye(2), [0.5, 0.5])

    def test_redundant_rows_dropped(self):
        red = reduce_to_full_dimension([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]], [1.0, 2.0])
        assert red.polytope.dim == 2

    def test_lift_satisfies_equalities(self):
        rng = np.random.default_rng(0)
        Aeq = rng.normal(size=(2, 5))
        x_feas = rng.uniform(0.5, 1.0, size=5)
        beq = Aeq @ x_feas
        red = reduce_to_full_dimension(Aeq, beq)
        y = x_feas[list(red.free_vars)]
        x = red.lift(y)
        np.testing.assert_allclose(Aeq @ x, beq, atol=1e-9)
        np.testing.assert_allclose(x, x_feas, atol=1e-9)
