import numpy as np
import pytest

from wilson_lab.bargmann import FockWorkspace
from wilson_lab.lie import build_basis, standard_rep, structure_constants

# filled by the acceptance suite, echoed at the end of the run
CRITERION_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def su2():
    b = build_basis("su", 2)
    return b, standard_rep(b), structure_constants(b)


@pytest.fixture(scope="session")
def ws6():
    return FockWorkspace(6)


@pytest.fixture(scope="session")
def ws10():
    return FockWorkspace(10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
