import numpy as np
# Import custom modules
from function_space.grid import Grid
from descriptor.system import CallableSource, DescriptorSystem, RhsSource

#===================================#
#=============Example 1=============#
#===================================#

# d/dt x1 = x1 - x2 + f1, 0 = x1 + f2
EXAMPLE1_F = np.array([[1.0, 0.0], [0.0, 0.0]])
EXAMPLE1_C = np.array([[1.0, -1.0], [1.0, 0.0]])
EXAMPLE1_F0 = np.array([1.0, 0.0])

def example1_system(grid: Grid) -> DescriptorSystem:
    return DescriptorSystem(EXAMPLE1_F, EXAMPLE1_C, grid)

def example1_rhs(t0: float = 0.0) -> RhsSource:
    """
    f1 = 0, f2(t) = -exp(t - t0), f0 = (1, 0); the unique solution is x = (exp(t - t0), 0).
    """
    def f(t):
        return np.stack([np.zeros_like(t), -np.exp(t - t0)], axis=-1)
    return RhsSource(CallableSource(f, (2,)), EXAMPLE1_F0)

#===================================#
#=============Example 2=============#
#===================================#

EXAMPLE2_F = np.array([[-2.0, 6.0], [2.0, -6.0]])
EXAMPLE2_C = np.array([[1.0, -3.0], [2.0, -6.0]])
# Printed reduction pair
EXAMPLE2_L = np.array([[-1 / 3, 1 / 6], [1 / 3, 1 / 3]])
EXAMPLE2_R = np.array([[0.0, 1 / 2], [-1 / 3, 1 / 6]])
# Printed L C R; direct multiplication gives [[0, 0], [1, 0]]
EXAMPLE2_C0_PRINTED = np.array([[1.0, 0.0], [0.0, 0.0]])

def example2_system(grid: Grid) -> DescriptorSystem:
    return DescriptorSystem(EXAMPLE2_F, EXAMPLE2_C, grid)

def example2_reduced_system(grid: Grid) -> DescriptorSystem:
    """
    The pencil (L F R, L C R) built from the printed pair.
    """
    return DescriptorSystem(EXAMPLE2_L @ EXAMPLE2_F @ EXAMPLE2_R, EXAMPLE2_L @ EXAMPLE2_C @ EXAMPLE2_R, grid)
