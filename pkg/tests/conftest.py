import math

import numpy as np
import pytest
from hypothesis import settings

from dressmag.model import SignalParams, SystemParams
from dressmag.protocols import StirapParams

TWO_PI = 2 * math.pi

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def system():
    """Reference operating point: 1 mT bias, 18 kHz dressing."""
    return SystemParams(omega0=TWO_PI * 12.642812118e9, lambda_plus=TWO_PI * 14.076e6,
                        lambda_minus=TWO_PI * 14.1e6, Omega=TWO_PI * 18e3)


@pytest.fixture
def stirap():
    return StirapParams(18e3)


@pytest.fixture
def signal():
    return SignalParams(omega_g=TWO_PI * 7.54)


def random_hermitian(rng, scale=1.0):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return scale * (a + a.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20160)
