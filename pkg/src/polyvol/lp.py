"""Small dense linear programs: two-phase tableau simplex and the Chebyshev ball."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyPolytopeError,
    NotFullDimensionalError,
    NumericalError,
    PivotLimitError,
    UnboundedPolytopeError,
)
from .geometry import Ball, HPolytope

_PIVOT_TOL = 1e-9
_COST_TOL = 1e-9


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """maximize ``objective @ y`` subject to ``G y <= h``.

    ``nonneg`` flags variables constrained to ``y_j >= 0``; the rest are
    free.  ``None`` means all variables are free.
    """

    objective: np.ndarray
    G: np.ndarray
    h: np.ndarray
    nonneg: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
        self.h = np.asarray(self.h, dtype=float).reshape(-1)
        k, n = self.G.shape
        if k < 1 or n < 1:
            raise ValueError("LP needs at least one constraint and one variable")
        if self.objective.shape != (n,) or self.h.shape != (k,):
            raise ValueError("LP dimensions disagree")
        if self.nonneg is None:
            self.nonneg = np.zeros(n, dtype=bool)
        else:
            self.nonneg = np.asarray(self.nonneg, dtype=bool).reshape(-1)
            if self.nonneg.shape != (n,):
                raise ValueError("nonneg flags must have one entry per variable")
        if not (np.all(np.isfinite(self.G)) and np.all(np.isfinite(self.h))
                and np.all(np.isfinite(self.objective))):
            raise ValueError("LP entries must be finite")


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    value: float | None = None
    pivots: int = 0


class _Dictionary:
    """Simplex dictionary ``x_B = rhs - D x_N`` with objective ``z0 + r x_N``.

    Only the nonbasic columns are stored, so a pivot costs O(k * n_N)
    regardless of how many slack variables there are.  Variables are
    identified by integer labels; ``basic[i]`` labels row i and
    ``nonbasic[j]`` labels column j.
    """

    def __init__(self, D, rhs, basic, nonbasic, limit):
        self.D = D
        self.rhs = rhs
        self.basic = basic
        self.nonbasic = nonbasic
        self.r = np.zeros(D.shape[1])
        self.z0 = 0.0
        self.limit = limit
        self.pivots = 0

    def set_objective(self, cost):
        """Install ``cost`` (indexed by label) in terms of the current nonbasics."""
        cb = cost[self.basic]
        self.r = cost[self.nonbasic] - cb @ self.D
        self.z0 = float(cb @ self.rhs)

    def pivot(self, i, j):
        self.pivots += 1
        if self.pivots > self.limit:
            raise PivotLimitError()
        D, rhs = self.D, self.rhs
        p = D[i, j]
        row = D[i] / p
        row[j] = 1.0 / p
        rhs_i = rhs[i] / p
        col = D[:, j].copy()
        col[i] = 0.0
        nz = np.flatnonzero(col)
        D[nz] -= np.outer(col[nz], row)
        D[nz, j] = -col[nz] / p
        rhs[nz] -= col[nz] * rhs_i
        rhs[(rhs < 0.0) & (rhs > -1e-11)] = 0.0
        D[i] = row
        rhs[i] = rhs_i
        rj = self.r[j]
        self.r -= rj * row
        self.r[j] = -rj / p
        self.z0 += rj * rhs_i
        self.basic[i], self.nonbasic[j] = self.nonbasic[j], self.basic[i]

    def optimize(self, blocked=()):
        """Maximize the installed objective; False if unbounded.

        Dantzig's rule, switching to Bland's rule after a degenerate pivot
        so that cycling cannot occur.
        """
        bland = False
        while True:
            r = self.r.copy()
            for lab in blocked:
                r[self.nonbasic == lab] = 0.0
            tol = _COST_TOL * (1.0 + np.abs(r).max())
            cand = np.flatnonzero(r > tol)
            if cand.size == 0:
                return True
            if bland:
                j = int(cand[np.argmin(self.nonbasic[cand])])
            else:
                j = int(cand[np.argmax(r[cand])])
            col = self.D[:, j]
            pos = col > _PIVOT_TOL
            if not pos.any():
                return False
            ratios = np.full(col.shape, np.inf)
            ratios[pos] = self.rhs[pos] / col[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))
            i = int(ties[np.argmin(self.basic[ties])])
            bland = best <= 1e-12
            self.pivot(i, j)


def solve(lp: LinearProgram) -> LpSolution:
    """Two-phase dense simplex.

    Free variables are split into positive and negative parts.  Phase one
    uses a single auxiliary variable subtracted from every row.
    """
    k, n = lp.G.shape
    cols, signs, owner = [], [], []
    for j in range(n):
        cols.append(lp.G[:, j]); signs.append(1.0); owner.append(j)
        if not lp.nonneg[j]:
            cols.append(-lp.G[:, j]); signs.append(-1.0); owner.append(j)
    G = np.column_stack(cols)
    nz = G.shape[1]
    aux = nz + k
    n_labels = aux + 1
    cost = np.zeros(n_labels)
    cost[:nz] = [lp.objective[o] * s for o, s in zip(owner, signs)]

    rhs = lp.h.copy()
    limit = 50 * (k + n)
    if rhs.min() >= 0.0:
        dic = _Dictionary(G.copy(), rhs, np.arange(nz, nz + k), np.arange(nz), limit)
    else:
        D = np.hstack([G, -np.ones((k, 1))])
        dic = _Dictionary(D, rhs, np.arange(nz, nz + k), np.append(np.arange(nz), aux), limit)
        phase1 = np.zeros(n_labels)
        phase1[aux] = -1.0
        dic.set_objective(phase1)
        dic.pivot(int(np.argmin(rhs)), nz)
        dic.optimize()
        scale = max(1.0, np.abs(lp.h).max())
        if -dic.z0 > 1e-7 * scale:
            return LpSolution(LpStatus.INFEASIBLE, pivots=dic.pivots)
        rows = np.flatnonzero(dic.basic == aux)
        if rows.size:
            i = int(rows[0])
            j = int(np.argmax(np.abs(dic.D[i])))
            dic.pivot(i, j)
        keep = dic.nonbasic != aux
        dic.D = dic.D[:, keep]
        dic.nonbasic = dic.nonbasic[keep]

    dic.set_objective(cost)
    if not dic.optimize():
        return LpSolution(LpStatus.UNBOUNDED, pivots=dic.pivots)

    z = np.zeros(n_labels)
    z[dic.basic] = dic.rhs
    y = np.zeros(n)
    for i, (o, s) in enumerate(zip(owner, signs)):
        y[o] += s * z[i]
    return LpSolution(LpStatus.OPTIMAL, y, float(lp.objective @ y), dic.pivots)


def chebyshev_ball(P: HPolytope) -> Ball:
    """Largest inscribed ball of P.

    Solves ``max R s.t. a_i x + R ||a_i|| <= b_i, R >= 0`` on the
    row-normalized system.
    """
    Pn = P.normalized()
    d = P.dim
    G = np.hstack([Pn.A, np.ones((P.n_facets, 1))])
    obj = np.zeros(d + 1)
    obj[-1] = 1.0
    nonneg = np.zeros(d + 1, dtype=bool)
    nonneg[-1] = True
    sol = solve(LinearProgram(obj, G, Pn.b, nonneg))
    if sol.status is LpStatus.INFEASIBLE:
        raise EmptyPolytopeError()
    if sol.status is LpStatus.UNBOUNDED:
        raise UnboundedPolytopeError()
    center, r = sol.x[:d], sol.x[d]
    if r <= 1e-12:
        raise NotFullDimensionalError()
    if np.any(r > Pn.b - Pn.A @ center + 1e-7):
        raise NumericalError("Chebyshev ball violates a facet")
    return Ball(center, r)


def bounding_box(P: HPolytope) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned bounding box of P from 2d linear programs."""
    d = P.dim
    lo, hi = np.empty(d), np.empty(d)
    for j in range(d):
        for sign, dest in ((1.0, hi), (-1.0, lo)):
            obj = np.zeros(d)
            obj[j] = sign
            sol = solve(LinearProgram(obj, P.A, P.b))
            if sol.status is LpStatus.INFEASIBLE:
                raise EmptyPolytopeError()
            if sol.status is LpStatus.UNBOUNDED:
                raise UnboundedPolytopeError()
            dest[j] = sol.x[j]
    return lo, hi
