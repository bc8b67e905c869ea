import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from gibbsfactor import (TwoBlockPotential, build_factor, build_system, full_shift,
                         golden_mean_shift)

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROWS = {
    "A": [[0, 1, 1], [1, 1, 0], [1, 0, 1]],
    "B": [[0, 1, 0], [1, 1, 1], [1, 0, 1]],
    "C": [[0, 1, 1], [1, 0, 1], [1, 1, 0]],
}


def make_factor(rows, y=None):
    X = build_system(3, rows)
    return build_factor(X, y or golden_mean_shift(), [1, 2, 2])


@pytest.fixture
def sys_a():
    fs = make_factor(ROWS["A"])
    return fs, TwoBlockPotential.zero(fs.domain)


@pytest.fixture
def sys_b():
    fs = make_factor(ROWS["B"])
    return fs, TwoBlockPotential.zero(fs.domain)


@pytest.fixture
def sys_c():
    fs = make_factor(ROWS["C"])
    return fs, TwoBlockPotential.zero(fs.domain)


@pytest.fixture
def sys_d():
    fs = make_factor(ROWS["C"])
    return fs, TwoBlockPotential.from_weights(fs.domain, {(2, 3): 2})


@pytest.fixture
def full32():
    fs = build_factor(full_shift(3), full_shift(2), [1, 2, 2])
    return fs, TwoBlockPotential.zero(fs.domain)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
