import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ktlab.operators import polynomial_profile

settings.register_profile("ktlab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ktlab")


@pytest.fixture(scope="session")
def alpha2():
    return polynomial_profile(2, 10**6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
