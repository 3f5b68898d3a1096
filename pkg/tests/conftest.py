import numpy as np
import pytest

from brokenmm.gfmat import BitMatrix


def scalar_bool_product(a, b):
    """Triple-loop OR-of-ANDs on plain lists; independent of the packed kernels."""
    d1, d3 = len(a), len(a[0])
    d2 = len(b[0])
    return [[int(any(a[i][k] and b[k][j] for k in range(d3))) for j in range(d2)] for i in range(d1)]


def scalar_gf2_product(a, b):
    d1, d3 = len(a), len(a[0])
    d2 = len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(d3)) % 2 for j in range(d2)] for i in range(d1)]


def random_pair(rng, d1, d2, d3, density=0.5):
    A = BitMatrix.random(d1, d3, density, rng)
    B = BitMatrix.random(d3, d2, density, rng)
    return A, B


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
