import numpy as np
import pytest

from dropsed.core import InitialShape, make_grid, sample_shape


@pytest.fixture(scope="session")
def grid_small():
    return make_grid(40, 80, 0.02, 1.0)


@pytest.fixture(scope="session")
def sphere_small(grid_small):
    return sample_shape(InitialShape("sphere"), grid_small)


@pytest.fixture(scope="session")
def grid_paper():
    return make_grid(100, 200, 0.01, 25.0)


@pytest.fixture(scope="session")
def sphere_paper(grid_paper):
    return sample_shape(InitialShape("sphere"), grid_paper)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
