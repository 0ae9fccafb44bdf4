import pytest

from relayplan.geometry import build_grid, sample_cell
from relayplan.propagation import PropagationParams

# criterion number -> (passed, message); filled by test_acceptance
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def grid10():
    return build_grid(1.0, 10)


@pytest.fixture(scope="session")
def grid2():
    return build_grid(1.0, 2)


@pytest.fixture(scope="session")
def params():
    return PropagationParams()


@pytest.fixture(scope="session")
def uniform1k(grid10):
    return sample_cell(grid10, 1000, "uniform", 7)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        ok, msg = ACCEPTANCE_LINES[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {msg}")
