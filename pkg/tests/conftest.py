"""Shared fixtures: canonical scenario configs and channel draws."""

import numpy as np
import pytest

from adma.config import SystemConfig


@pytest.fixture
def paper_config():
    """Large-array scenario: M=128, K=32, L=64, tau=16."""
    return SystemConfig()


@pytest.fixture
def fpga_config():
    """Hardware-model scenario: M=128, K=16, L=4, tau=4."""
    return SystemConfig(M=128, K=16, L=4, tau=4)


@pytest.fixture
def small_config():
    """Cheap scenario for end-to-end tests: spread users, distinct windows."""
    return SystemConfig(M=64, K=8, L=16, tau=8,
                        theta_centers_deg=(-60.0, -40.0, -25.0, -10.0,
                                           5.0, 20.0, 38.0, 55.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
