import numpy as np
import pytest
# Import custom modules
from function_space.grid import Grid
from descriptor.catalog import example1_system, example2_reduced_system

@pytest.fixture
def unit_grid():
    return Grid(0.0, 1.0, 2001)

@pytest.fixture
def example1(unit_grid):
    return example1_system(unit_grid)

@pytest.fixture
def example2_reduced(unit_grid):
    return example2_reduced_system(unit_grid)

@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
