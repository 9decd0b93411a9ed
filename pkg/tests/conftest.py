import numpy as np
import pytest
from hypothesis import settings

from greenperturb.domain import build_disk, build_star

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def disk():
    return build_disk(1.0)


@pytest.fixture(scope="session")
def star():
    return build_star([1.0, 0.2], [0.0, 0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_interior(rng, n, rmax=0.8):
    r = rmax * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
