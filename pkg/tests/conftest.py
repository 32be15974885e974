import math

import numpy as np
import pytest

from quasiground.curves import branch_point
from quasiground.radial_field import Params, RadialProfile, graded_grid
from quasiground.shooting import shoot_free_boundary


def gaussian(N, width=1.0, height=1.0, growth=1.005, r_max=12.0):
    r = graded_grid(r_max * width, 1e-3 * width, growth)
    return RadialProfile(N, r, height * np.exp(-0.5 * (r / width) ** 2), decreasing=True)


@pytest.fixture(scope="session")
def p19():
    return Params(1, 9)


@pytest.fixture(scope="session")
def branch_19_lam1(p19):
    return branch_point(p19, 1.0, keep_profile=True)


@pytest.fixture(scope="session")
def free_boundary_19(p19):
    return shoot_free_boundary(p19)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


SQRT_PI = math.sqrt(math.pi)


# one summary line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
