import numpy as np
import pytest

from wignerlab.grid import build_phase_space_grid

CRITERIA = []


def record(criterion, passed, detail):
    """Acceptance bookkeeping: one line per criterion, printed in the summary."""
    CRITERIA.append((criterion, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(CRITERIA, key=lambda c: c[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{crit}] {detail}")


@pytest.fixture
def small_grid():
    return build_phase_space_grid(64, 64, -8.0, 8.0, -8.0, 8.0)


@pytest.fixture
def grid128():
    return build_phase_space_grid(128, 128, -8.0, 8.0, -8.0, 8.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
