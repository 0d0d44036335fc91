"""Benchmark polytopes in H-representation.

Naming follows the usual shorthand: ``cube-d``, ``cross-d``, ``simplex-d``
(``Δ-d``), ``simplex-product-d`` (``Δ-d-d``), ``skinny-cube-d``,
``rh-d-m`` (random tangent hyperplanes) and ``birkhoff-n`` (``B_n``).
:func:`from_spec` parses ``KIND:PARAMS`` strings such as ``cube:10`` or
``rh:8,25,3`` (the last field of ``rh`` is the seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import PolytopeError
from .geometry import HPolytope, ReducedPolytope, check_bounded, reduce_to_full_dimension
from .rng import RngStream, as_stream

MAX_CROSS_DIM = 25
RH_ATTEMPTS = 100

#: Reference volume of B_5 in the free-block coordinates (no closed form is used).
BIRKHOFF_5_REFERENCE = 2.25e-7


def _check_dim(d: int, least: int = 1):
    if int(d) != d or d < least:
        raise ValueError(f"dimension must be an integer >= {least}, got {d}")


def cube(d: int) -> HPolytope:
    """``[-1, 1]^d``."""
    _check_dim(d)
    eye = np.eye(d)
    return HPolytope(np.vstack([eye, -eye]), np.ones(2 * d))


def cross(d: int) -> HPolytope:
    """``{x | sum |x_i| <= 1}`` written with all ``2^d`` sign patterns."""
    _check_dim(d)
    if d > MAX_CROSS_DIM:
        raise ValueError(f"cross polytope limited to d <= {MAX_CROSS_DIM} ({2 ** d} rows requested)")
    A = np.array(list(product((1.0, -1.0), repeat=d)))
    return HPolytope(A, np.ones(len(A)))


def simplex(d: int) -> HPolytope:
    """``{x >= 0, sum x_i <= 1}``."""
    _check_dim(d)
    A = np.vstack([-np.eye(d), np.ones((1, d))])
    b = np.zeros(d + 1)
    b[-1] = 1.0
    return HPolytope(A, b)


def simplex_product(d: int) -> HPolytope:
    """Product of two standard ``d``-simplices, dimension ``2d``."""
    _check_dim(d)
    S = simplex(d)
    Z = np.zeros_like(S.A)
    A = np.block([[S.A, Z], [Z, S.A]])
    return HPolytope(A, np.concatenate([S.b, S.b]))


def skinny_cube(d: int, angle_deg: float = 30.0) -> HPolytope:
    """``[-100, 100] x [-1, 1]^(d-1)`` rotated in the (x1, x2) plane."""
    _check_dim(d, 2)
    box = cube(d)
    b = box.b.copy()
    b[0] = b[d] = 100.0
    th = math.radians(angle_deg)
    R = np.eye(d)
    R[0, 0] = R[1, 1] = math.cos(th)
    R[0, 1], R[1, 0] = -math.sin(th), math.sin(th)
    # x in rotated body iff R^T x in box, i.e. A R^T x <= b
    return HPolytope(box.A @ R.T, b)


def random_tangent(d: int, m: int, rng: RngStream | int | None = None) -> HPolytope:
    """``m`` hyperplanes tangent to the unit sphere with uniform random normals.

    Draws are repeated until the result is bounded; gives up after
    ``RH_ATTEMPTS`` tries.
    """
    _check_dim(d)
    if m < d + 1:
        raise ValueError("random tangent polytope needs m >= d + 1")
    rng = as_stream(rng)
    for _ in range(RH_ATTEMPTS):
        A = rng.normal((m, d))
        A /= np.linalg.norm(A, axis=1, keepdims=True)
        P = HPolytope(A, np.ones(m))
        if check_bounded(P):
            return P
    raise PolytopeError(f"no bounded rh-{d}-{m} polytope after {RH_ATTEMPTS} attempts")


def birkhoff_reduced(n: int) -> ReducedPolytope:
    """Doubly stochastic ``n x n`` matrices in the leading ``(n-1) x (n-1)`` entries.

    Variable ``x[i, j]`` has index ``i * n + j``.  The last column-sum
    equation is implied by the others and is left out.
    """
    _check_dim(n, 2)
    N = n * n
    rows = []
    for i in range(n):
        r = np.zeros(N)
        r[i * n:(i + 1) * n] = 1.0
        rows.append(r)
    for j in range(n - 1):
        c = np.zeros(N)
        c[j::n] = 1.0
        rows.append(c)
    Aeq = np.array(rows)
    beq = np.ones(len(rows))
    basic = [i * n + (n - 1) for i in range(n)] + [(n - 1) * n + j for j in range(n - 1)]
    return reduce_to_full_dimension(Aeq, beq, nonneg=True, pivot_order=basic)


def birkhoff(n: int) -> HPolytope:
    """The Birkhoff polytope ``B_n`` as a full-dimensional body of dimension ``(n-1)^2``."""
    return birkhoff_reduced(n).polytope


def exact_volume(kind: str, *params) -> float | None:
    """Known volume of a generator output, or ``None`` when there is no closed form."""
    kind = _canonical(kind)
    if kind == "cube":
        return 2.0 ** params[0]
    if kind == "cross":
        return 2.0 ** params[0] / math.factorial(params[0])
    if kind == "simplex":
        return 1.0 / math.factorial(params[0])
    if kind == "simplex-product":
        return 1.0 / math.factorial(params[0]) ** 2
    if kind == "skinny-cube":
        return 100.0 * 2.0 ** params[0]
    if kind == "birkhoff" and params[0] == 2:
        return 1.0
    return None


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: tuple[int, ...]
    seed: int | None = None

    def build(self) -> HPolytope:
        fn = {
            "cube": cube, "cross": cross, "simplex": simplex,
            "simplex-product": simplex_product, "skinny-cube": skinny_cube,
            "birkhoff": birkhoff,
        }
        if self.kind == "rh":
            return random_tangent(*self.params, rng=RngStream(self.seed or 0))
        return fn[self.kind](*self.params)

    @property
    def exact_volume(self) -> float | None:
        return exact_volume(self.kind, *self.params)

    @property
    def name(self) -> str:
        return "-".join([self.kind, *map(str, self.params)])


_ALIASES = {
    "cube": "cube", "cross": "cross", "simplex": "simplex", "delta": "simplex",
    "simplex-product": "simplex-product", "product": "simplex-product",
    "skinny-cube": "skinny-cube", "skinny": "skinny-cube",
    "rh": "rh", "random-tangent": "rh", "birkhoff": "birkhoff",
}
_ARITY = {"rh": (2, 3)}


def _canonical(kind: str) -> str:
    key = kind.strip().lower().replace("_", "-")
    if key not in _ALIASES:
        raise ValueError(f"unknown polytope kind {kind!r}; choose from {sorted(set(_ALIASES.values()))}")
    return _ALIASES[key]


def parse_spec(text: str) -> GeneratorSpec:
    """Parse ``KIND:P1[,P2...]``; for ``rh`` the parameters are ``d,m[,seed]``."""
    kind, sep, rest = text.partition(":")
    if not sep or not rest:
        raise ValueError(f"expected KIND:PARAMS, got {text!r}")
    kind = _canonical(kind)
    try:
        params = tuple(int(p) for p in rest.split(","))
    except ValueError:
        raise ValueError(f"generator parameters must be integers: {rest!r}") from None
    lo, hi = _ARITY.get(kind, (1, 1))
    if not lo <= len(params) <= hi:
        raise ValueError(f"{kind} takes {lo if lo == hi else f'{lo}-{hi}'} parameter(s)")
    seed = None
    if kind == "rh":
        seed = params[2] if len(params) == 3 else 0
        params = params[:2]
    return GeneratorSpec(kind, params, seed)


def from_spec(text: str) -> tuple[HPolytope, float | None]:
    """Build the polytope named by ``text`` and return it with its exact volume."""
    spec = parse_spec(text)
    return spec.build(), spec.exact_volume
