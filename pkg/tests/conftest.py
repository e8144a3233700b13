import numpy as np
import pytest

from lunasil import default_environment, default_network, standard_designs

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def designs():
    return standard_designs()


@pytest.fixture(scope="session")
def env():
    return default_environment()


@pytest.fixture()
def network():
    return default_network()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260823)
