import numpy as np
import pytest

from polyvol import RngStream
from polyvol.generators import cube, random_tangent, simplex


@pytest.fixture
def cube2():
    return cube(2)


@pytest.fixture
def delta2():
    return simplex(2)


@pytest.fixture(scope="session")
def rh_6_30():
    return random_tangent(6, 30, RngStream(11))


@pytest.fixture(scope="session")
def rh_8_40():
    return random_tangent(8, 40, RngStream(12))


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
