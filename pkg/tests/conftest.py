import numpy as np
import pytest

from tunneldwell import BarrierGeometry, PotentialModel


class RectangularBarrier:
    """Flat barrier of height v0 on [0, width]; outside it the potential is -inf-like low."""

    def __init__(self, v0, width, energy):
        self.v0 = v0
        self.width = width
        self.e = energy

    def potential(self, x, f=None):
        x = np.asarray(x, dtype=float)
        v = np.where((x >= 0) & (x <= self.width), self.v0, self.e - 1.0)
        return float(v) if v.ndim == 0 else v

    def energy(self, f=None):
        return self.e

    def geometry(self):
        return BarrierGeometry(0.0, self.width, 0.5 * self.width, self.v0, self.e, 1.0)


@pytest.fixture
def rectangle():
    return RectangularBarrier


@pytest.fixture(scope="session")
def models():
    return {
        (coords, screened): PotentialModel(coords, screened)
        for coords in ("parabolic", "spherical")
        for screened in (False, True)
    }


ACCEPTANCE_GRID = np.linspace(0.03, 0.12, 64)


#: One line per acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
