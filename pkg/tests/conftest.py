import numpy as np
import pytest

from wavepackets.params import DimensionlessFrame, PhysicalParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fig1_params():
    return PhysicalParams(k0=20.0, a0=0.003, t0=0.8, epsilon=0.06)


@pytest.fixture
def fig2_params():
    return PhysicalParams(k0=20.0, a0=0.006, t0=0.8, epsilon=0.12)


@pytest.fixture
def fig1_frame(fig1_params):
    return DimensionlessFrame(fig1_params)


@pytest.fixture
def fig2_frame(fig2_params):
    return DimensionlessFrame(fig2_params)


def wrap(a):
    return np.angle(np.exp(1j * np.asarray(a)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
