import numpy as np

from polyvol import HPolytope


def interior_points(P: HPolytope, n: int, rng: np.random.Generator, box: float = 3.0):
    """Rejection-sample ``n`` points of P from the box ``[-box, box]^d``."""
    out = []
    while len(out) < n:
        x = rng.uniform(-box, box, size=(4 * n, P.dim))
        ok = np.all(x @ P.A.T < P.b - 1e-9, axis=1)
        out.extend(x[ok])
    return np.array(out[:n])


#: (criterion, passed, detail) lines collected by the acceptance tests
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def report(criterion: str, passed: bool, detail: str) -> bool:
    ACCEPTANCE_LINES.append((criterion, passed, detail))
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    return passed
