import numpy as np
import pytest

from privcell.channel import Scenario


@pytest.fixture
def tiny():
    """Small scenario used where the physics does not matter much."""
    return Scenario(
        M=3, K=2, N_a=2, N_r=1, tau_p=2, tau_d=6,
        R_km=0.5, sigma2=1e-13, seed=1234,
    )


@pytest.fixture
def full_obs():
    """No switch: every antenna observed in every slot."""
    return Scenario(
        M=3, K=2, N_a=2, N_r=2, tau_p=2, tau_d=6,
        R_km=0.5, sigma2=1e-13, seed=1234,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(99)
