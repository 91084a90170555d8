import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stieltjes2d import registry
from stieltjes2d.core import Rect

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def unit():
    return Rect(0.0, 1.0, 0.0, 1.0)


@pytest.fixture
def reg():
    return registry.get


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
