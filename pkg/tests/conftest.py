from fractions import Fraction

import pytest

from twistoid.algebra import OrbitGrid
from twistoid.bundle import BundleContext
from twistoid.groupoid import TwistGroupoid
from twistoid.heisenberg import nc_clutching_data
from twistoid.torus import AffineTorusMap

MU, NU = Fraction(1, 4), Fraction(1, 6)
ALPHA = AffineTorusMap.of(2 * MU, 2 * NU)


def qhm_ctx(c: int = 1) -> BundleContext:
    return BundleContext(nc_clutching_data(-c), ALPHA)


@pytest.fixture(scope="session")
def ctx():
    return qhm_ctx(1)


@pytest.fixture(scope="session")
def G(ctx):
    return TwistGroupoid(ctx)


@pytest.fixture(scope="session")
def grid24():
    return OrbitGrid(qhm_ctx(1), 24)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
