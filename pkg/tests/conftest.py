import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def disc_matrix(rng, shape, radius=1.0):
    r = radius * np.sqrt(rng.uniform(size=shape))
    return r * np.exp(2j * np.pi * rng.uniform(size=shape))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
