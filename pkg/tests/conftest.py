import numpy as np
import pytest

from optomech.model import SystemParams

# filled in by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def prescribed_params():
    return SystemParams(kappa=0.2, gamma_m=1e-6, delta=1.0)


@pytest.fixture
def optical_params():
    return SystemParams(kappa=0.2, gamma_m=1e-6, delta=1.0, g=4e-6, n_m=2e3, n_a=0.0)


@pytest.fixture
def microwave_params():
    return SystemParams(kappa=0.02, gamma_m=3e-6, delta=1.0, g=2e-5, n_m=200.0, n_a=0.03)


def random_physical_covariance(rng, thermal_max=3.0):
    """V = S diag(nu1, nu1, nu2, nu2) S^T with a random symplectic S."""
    from tests.gaussian import random_symplectic

    nu = 0.5 + rng.uniform(0, thermal_max, size=2)
    S = random_symplectic(rng)
    return S @ np.diag([nu[0], nu[0], nu[1], nu[1]]) @ S.T
