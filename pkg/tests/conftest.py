import numpy as np
import pytest

from hypstep.model import PotentialParams

# (criterion id, passed, detail) collected by tests/test_acceptance.py
ACCEPTANCE_RESULTS = []


def second_derivative(f, h):
    """Fourth-order central second derivative on interior points (drops two per side)."""
    return (-f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]) / (12 * h * h)


def first_derivative(f, h):
    return (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)


def schrodinger_residual(psi, x, energy, V):
    """max |psi'' + (E - V) psi| / max |psi| on the interior of a uniform grid."""
    h = x[1] - x[0]
    res = second_derivative(psi, h) + (energy - V[2:-2]) * psi[2:-2]
    return float(np.max(np.abs(res)) / np.max(np.abs(psi)))


@pytest.fixture
def p_half():
    return PotentialParams(0.5, 1.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {cid:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
