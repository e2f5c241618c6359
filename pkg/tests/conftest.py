import math

import numpy as np
import pytest

from povm_uncertainty.optimize import OptimizerConfig

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def quick_config():
    return OptimizerConfig(seed=3, starts=8)


def ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def bloch_state(x, y, z):
    r = np.array([x, y, z], dtype=float)
    r = r / np.linalg.norm(r)
    theta, phi = math.acos(r[2]), math.atan2(r[1], r[0])
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
