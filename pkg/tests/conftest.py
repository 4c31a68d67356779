import numpy as np
import pytest

from psstspy.states import StateParams


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full oracle sweep, minutes at dim <= 256")


@pytest.fixture
def negative_state() -> StateParams:
    # W(0) < 0: nbar below sinh^2 r
    return StateParams(nbar=0.1, r=0.5, m=1)


@pytest.fixture
def threshold_state() -> StateParams:
    return StateParams(nbar=0.05, r=0.3, m=1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240613)


def random_points(rng: np.random.Generator, n: int = 25, radius: float = 2.5) -> np.ndarray:
    return rng.uniform(-radius, radius, n) + 1j * rng.uniform(-radius, radius, n)
