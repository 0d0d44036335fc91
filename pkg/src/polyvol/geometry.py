"""Polytopes, balls, ellipsoids and the linear-algebra helpers around them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyPolytopeError,
    NotPositiveDefiniteError,
    PolytopeError,
)
from .rng import RngStream

#: A point counts as inside when every slack is at least ``-INSIDE_TOL``.
INSIDE_TOL = 1e-9


def _readonly(x):
    x = np.array(x, dtype=float)
    x.setflags(write=False)
    return x


class HPolytope:
    """Polytope ``{x | A x <= b}`` in dense form.

    Boundedness is not checked here (see :func:`check_bounded`); a
    bounded full-dimensional polytope needs ``m >= d + 1`` rows.
    """

    def __init__(self, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.ndim != 2:
            raise PolytopeError("A must be a matrix")
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatchError(
                f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if A.shape[0] == 0 or A.shape[1] == 0:
            raise PolytopeError("polytope needs at least one row and one column")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise PolytopeError("non-finite entries in A or b")
        zero = ~np.any(A != 0.0, axis=1)
        if zero.any():
            raise PolytopeError(f"zero constraint row(s) {np.flatnonzero(zero).tolist()}")
        self.A = _readonly(A)
        self.b = _readonly(b)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def n_facets(self) -> int:
        return self.A.shape[0]

    def __repr__(self):
        return f"HPolytope(m={self.n_facets}, d={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, HPolytope):
            return NotImplemented
        return np.array_equal(self.A, other.A) and np.array_equal(self.b, other.b)

    __hash__ = None

    def _check_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise DimensionMismatchError(
                f"point of shape {p.shape} for polytope of dimension {self.dim}")
        return p

    def slack(self, p) -> np.ndarray:
        """``b - A p``."""
        p = self._check_point(p)
        return self.b - self.A @ p

    def contains(self, p) -> bool:
        return bool(np.min(self.slack(p)) >= -INSIDE_TOL)

    def translate(self, shift) -> "HPolytope":
        """The polytope ``P - shift``, i.e. ``{y | A y <= b - A shift}``."""
        shift = self._check_point(shift)
        return HPolytope(self.A, self.b - self.A @ shift)

    def scale(self, s: float) -> "HPolytope":
        """The polytope ``s * P`` for ``s > 0``."""
        if s <= 0:
            raise ValueError("scale factor must be positive")
        return HPolytope(self.A, self.b * s)

    def normalized(self) -> "HPolytope":
        """Same set with every row scaled to unit Euclidean norm."""
        norms = np.linalg.norm(self.A, axis=1)
        return HPolytope(self.A / norms[:, None], self.b / norms)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _readonly(np.asarray(self.center).reshape(-1)))
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, p, tol: float = INSIDE_TOL) -> bool:
        return bool(np.linalg.norm(np.asarray(p) - self.center) <= self.radius + tol)


@dataclass(frozen=True)
class Ellipsoid:
    """``{x | (x - center)^T E (x - center) <= 1}`` with E positive definite."""

    E: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.E, dtype=float)
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if E.shape != (c.shape[0], c.shape[0]):
            raise DimensionMismatchError("ellipsoid matrix and center disagree")
        scale = np.maximum(np.abs(E), np.abs(E.T))
        if np.any(np.abs(E - E.T) > 1e-10 * np.maximum(scale, 1e-300)):
            raise ValueError("ellipsoid matrix is not symmetric")
        # symmetrize exactly so downstream factorizations see a symmetric matrix
        E = 0.5 * (E + E.T)
        cholesky(E)
        object.__setattr__(self, "E", _readonly(E))
        object.__setattr__(self, "center", _readonly(c))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def quadratic_form(self, points) -> np.ndarray:
        diff = np.atleast_2d(points) - self.center
        return np.einsum("ij,jk,ik->i", diff, self.E, diff)

    def axes(self) -> np.ndarray:
        """Semi-axis lengths, ascending."""
        return np.sort(1.0 / np.sqrt(np.linalg.eigvalsh(self.E)))

    def axes_ratio(self) -> float:
        ax = self.axes()
        return float(ax[-1] / ax[0])


def cholesky(M) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == M``.

    Raises :class:`NotPositiveDefiniteError` when a pivot is not positive.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError("cholesky needs a square matrix")
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError() from None
    if not np.all(np.diag(L) > 0):
        raise NotPositiveDefiniteError()
    return L


def log_ball_volume(d: int, r: float) -> float:
    """Natural log of the volume of the d-ball of radius r."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if r <= 0:
        raise ValueError("radius must be positive")
    return 0.5 * d * math.log(math.pi) + d * math.log(r) - math.lgamma(0.5 * d + 1)


def ball_volume(d: int, r: float = 1.0) -> float:
    return math.exp(log_ball_volume(d, r))


def random_point_in_ball(ball: Ball, rng: RngStream) -> np.ndarray:
    d = ball.dim
    g = rng.normal(d)
    g /= np.linalg.norm(g)
    return ball.center + ball.radius * rng.uniform() ** (1.0 / d) * g


def check_bounded(P: HPolytope) -> bool:
    """True iff every coordinate is bounded above and below on P.

    Raises :class:`EmptyPolytopeError` if P is infeasible.
    """
    from .lp import LinearProgram, LpStatus, solve

    Pn = P.normalized()
    for k in range(P.dim):
        for sign in (1.0, -1.0):
            c = np.zeros(P.dim)
            c[k] = sign
            sol = solve(LinearProgram(c, Pn.A, Pn.b))
            if sol.status is LpStatus.INFEASIBLE:
                raise EmptyPolytopeError()
            if sol.status is LpStatus.UNBOUNDED:
                return False
    return True


@dataclass(frozen=True)
class AffineMap:
    """``x = matrix @ y + offset``."""

    matrix: np.ndarray
    offset: np.ndarray

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return y @ self.matrix.T + self.offset


@dataclass(frozen=True)
class ReducedPolytope:
    """Full-dimensional polytope in the free variables plus the lift back."""

    polytope: HPolytope
    lift: AffineMap
    free_vars: tuple[int, ...]
    basic_vars: tuple[int, ...] = field(default=())


def _rref(M, rhs, order, tol):
    """Gauss-Jordan elimination with partial pivoting.

    Columns are tried in ``order``; within a column the row of largest
    magnitude is chosen.  A candidate pivot is rejected when it is below
    ``tol`` times the norm of its row.  Returns the reduced rows (only the
    pivot rows), their right-hand sides and the pivot columns.
    """
    M = M.copy()
    rhs = rhs.copy()
    rows_left = list(range(M.shape[0]))
    pivots = []
    pivot_rows = []
    for col in order:
        if not rows_left:
            break
        cand = np.array(rows_left)
        vals = np.abs(M[cand, col])
        i = int(cand[np.argmax(vals)])
        row_norm = np.linalg.norm(M[i])
        if row_norm == 0.0 or abs(M[i, col]) <= tol * row_norm:
            continue
        piv = M[i, col]
        M[i] /= piv
        rhs[i] /= piv
        for r in range(M.shape[0]):
            if r != i and M[r, col] != 0.0:
                f = M[r, col]
                M[r] -= f * M[i]
                rhs[r] -= f * rhs[i]
        M[i, col] = 1.0
        pivots.append(col)
        pivot_rows.append(i)
        rows_left.remove(i)
    # rows never pivoted must now be (numerically) zero
    for r in rows_left:
        scale = max(1.0, np.abs(rhs).max(initial=0.0))
        if abs(rhs[r]) > 1e-9 * scale:
            raise PolytopeError("inconsistent equality system")
    return M[pivot_rows], rhs[pivot_rows], pivots


def reduce_to_full_dimension(Aeq, beq, nonneg: bool = True, A_ineq=None, b_ineq=None,
                             pivot_order=None, tol: float = 1e-10) -> ReducedPolytope:
    """Eliminate ``Aeq x = beq`` and express the feasible set in free variables.

    The set ``{x | Aeq x = beq, x >= 0 (if nonneg), A_ineq x <= b_ineq}`` is
    rewritten through the reduced row echelon form ``x_B = beq' - A' x_F``
    as a full-dimensional H-polytope in ``x_F``.  ``pivot_order`` lists the
    columns to try as pivots first (basic variables); the remaining columns
    become free variables in increasing index order.
    """
    Aeq = np.atleast_2d(np.asarray(Aeq, dtype=float))
    beq = np.asarray(beq, dtype=float).reshape(-1)
    n = Aeq.shape[1]
    if Aeq.shape[0] != beq.shape[0]:
        raise DimensionMismatchError("Aeq and beq disagree")
    order = list(range(n)) if pivot_order is None else list(pivot_order)
    order += [j for j in range(n) if j not in order]
    R, rhs, basic = _rref(Aeq, beq, order, tol)
    free = [j for j in range(n) if j not in basic]
    if not free:
        raise PolytopeError("zero-dimensional")

    # x = T y + x0 with y = x_F
    T = np.zeros((n, len(free)))
    x0 = np.zeros(n)
    T[free, np.arange(len(free))] = 1.0
    for row, bcol in enumerate(basic):
        T[bcol] = -R[row, free]
        x0[bcol] = rhs[row]

    blocks_A, blocks_b = [], []
    if nonneg:
        # -x <= 0  ->  -(T y + x0) <= 0
        blocks_A.append(-T)
        blocks_b.append(x0)
    if A_ineq is not None:
        A_ineq = np.atleast_2d(np.asarray(A_ineq, dtype=float))
        b_ineq = np.asarray(b_ineq, dtype=float).reshape(-1)
        blocks_A.append(A_ineq @ T)
        blocks_b.append(b_ineq - A_ineq @ x0)
    if not blocks_A:
        raise PolytopeError("no inequalities: the solution set is an unbounded affine subspace")
    A = np.vstack(blocks_A)
    b = np.concatenate(blocks_b)
    zero = np.all(np.abs(A) <= 1e-12, axis=1)
    if np.any(b[zero] < -INSIDE_TOL):
        raise EmptyPolytopeError()
    A, b = A[~zero], b[~zero]
    return ReducedPolytope(HPolytope(A, b), AffineMap(T, x0), tuple(free), tuple(basic))
