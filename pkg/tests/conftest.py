import numpy as np
import pytest

from kreinshift import ConstantWeights, GeometricWeights, OscillatingWeights


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


@pytest.fixture(scope="session")
def paper2():
    return OscillatingWeights(c=2.0)


@pytest.fixture(scope="session")
def geom2():
    return GeometricWeights(ratio=2.0)


@pytest.fixture(scope="session")
def const():
    return ConstantWeights()
