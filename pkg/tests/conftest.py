import numpy as np
import pytest

from isoharm.curve import IntervalSystem, validate_config


@pytest.fixture(scope="session")
def cubic_system():
    c = sorted((2.0 * np.cos(k * np.pi / 9.0) for k in (1, 2, 4, 5, 7, 8)), reverse=True)
    return IntervalSystem(tuple(c))


@pytest.fixture(scope="session")
def cfg_g2():
    return validate_config(x=(2.0, 5.0), u=(3.0,), y0=-1.0)


@pytest.fixture(scope="session")
def cfg_g3():
    return validate_config(x=(2.0, 5.0, 9.0), u=(3.0, 7.0), y0=-1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(777)
