import numpy as np
import pytest

from omitloop import default_params


@pytest.fixture(scope="session")
def base():
    return default_params()


@pytest.fixture(scope="session")
def omega_window(base):
    """Canonical probe window around the mechanical resonance."""
    return np.linspace(0.98, 1.02, 2001) * base.omega_m
