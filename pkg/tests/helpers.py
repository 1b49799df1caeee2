import numpy as np
from scipy.linalg import null_space
# Import custom modules
from function_space.grid import Grid, GridFn
from descriptor.system import DescriptorSystem, PolySource, AdjointElement

def random_poly_fn(rng, grid: Grid, dim: int, degree: int = 3) -> GridFn:
    coeffs = rng.uniform(-1.0, 1.0, size=(degree + 1, dim))
    return GridFn(grid, np.polynomial.polynomial.polyval(grid.nodes, coeffs).T)

def random_system(rng, grid: Grid, m: int, n: int, rank: int = None) -> DescriptorSystem:
    """
    F of the requested rank and a quadratic C(t).
    """
    rank = min(m, n) if rank is None else rank
    F = rng.uniform(-1.0, 1.0, size=(m, rank)) @ rng.uniform(-1.0, 1.0, size=(rank, n))
    C = PolySource(rng.uniform(-1.0, 1.0, size=(3, m, n)))
    return DescriptorSystem(F, C, grid)

def random_adjoint_element(rng, system: DescriptorSystem) -> AdjointElement:
    """
    z = (c - t) p(t) + U0 q(t) with U0 spanning ker(F'), so F'z(c) = 0;
    z0 = P z(a) + U0 d0.
    """
    grid = system.grid
    m = system.m
    p = random_poly_fn(rng, grid, m).values
    U0 = null_space(system.F.T)
    z = (grid.c - grid.nodes)[:, None] * p
    d = np.zeros(m)
    if U0.shape[1]:
        q = random_poly_fn(rng, grid, U0.shape[1]).values
        z = z + q @ U0.T
        d = U0 @ rng.uniform(-1.0, 1.0, size=U0.shape[1])
    P = np.linalg.pinv(system.F.T) @ system.F.T
    return AdjointElement(GridFn(grid, z), P @ z[0] + d)
