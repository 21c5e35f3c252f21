import math

import pytest

from thztrack.channel import ArrayConfig

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def half_wave():
    """Factory for a half-wavelength array at 275 GHz."""
    def make(n):
        return ArrayConfig.for_carrier(n, 275e9)
    return make


@pytest.fixture
def acceptance_report():
    def report(criterion, passed, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def close_angle(a, b, tol=1e-12):
    return abs(math.remainder(a - b, 2 * math.pi)) <= tol
