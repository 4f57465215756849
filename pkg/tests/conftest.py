import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from burkqc.beltrami import constant_mu, random_smooth_mu, solve_principal  # noqa: E402

A_PHASE = 0.5 * np.exp(1j * np.pi / 3)


@pytest.fixture(scope="session")
def sol_const03():
    return solve_principal(constant_mu(0.3, 256))


@pytest.fixture(scope="session")
def sol_const05():
    return solve_principal(constant_mu(A_PHASE, 256))


@pytest.fixture(scope="session")
def sol_smooth():
    return solve_principal(random_smooth_mu(np.random.default_rng(7), 0.4, 256))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
