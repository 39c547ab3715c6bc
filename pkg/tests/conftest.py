import numpy as np
import pytest

from photondelay.ode import IntegratorSettings, evolve
from photondelay.params import SystemConfig

FIG3 = SystemConfig(gamma1=4, gamma2=64, gamma3=1024, delta=1.56 * 64)
FIG4 = SystemConfig(gamma1=1, gamma2=16, gamma3=256)


@pytest.fixture(scope="session")
def fig3_cfg():
    return FIG3


@pytest.fixture(scope="session")
def fig3_ode():
    """Brute-force run at M = 2048 over t in [0, 1], shared by the ODE tests."""
    times = np.linspace(0.0, 1.0, 1001)
    return evolve(FIG3, IntegratorSettings(rel_tol=1e-10, abs_tol=1e-12, t_end=1.0), times)
