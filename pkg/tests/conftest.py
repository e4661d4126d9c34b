import numpy as np
import pytest

from garnierlab.fuchsian import PoleConfig


@pytest.fixture
def t():
    return PoleConfig(2.1 + 0.4j, -1.3 + 1.1j, 0.6 - 1.7j)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def cunit(rng, n=None, half=0.5):
    return rng.uniform(-half, half, n) + 1j * rng.uniform(-half, half, n)
