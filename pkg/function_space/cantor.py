from fractions import Fraction
import numpy as np
# Import custom modules
from utils import InvalidInputError
from function_space.grid import Grid, GridFn

CANTOR_DEPTH = 40

def cantor(t: float, depth: int = CANTOR_DEPTH) -> float:
    """
    Cantor-Lebesgue function by ternary expansion.

    Digits are read exactly from the binary value of t: expansion stops at
    the first digit 1, digits 0 and 2 become binary 0 and 1. The error is
    below 2**-depth.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError(f'cantor is defined on [0, 1], got t={t}')
    if t == 1.0:
        return 1.0

    frac = Fraction(float(t))
    p, q = frac.numerator, frac.denominator
    value = 0.0
    weight = 0.5
    for _ in range(depth):
        p *= 3
        digit, p = divmod(p, q)
        if digit == 1:
            return value + weight
        if digit == 2:
            value += weight
        if p == 0:
            break
        weight *= 0.5
    return value

def cantor_fn(grid: Grid) -> GridFn:
    if grid.a < 0.0 or grid.c > 1.0:
        raise InvalidInputError(f'cantor is defined on [0, 1], grid spans [{grid.a}, {grid.c}]')
    return GridFn(grid, np.array([cantor(t) for t in grid.nodes]))

def bernstein(f, n: int, grid: Grid) -> GridFn:
    """
    Samples of the Bernstein polynomial B_n(f)(t) = sum_i f(i/n) C(n,i) t^i (1-t)^(n-i).

    Evaluated by the de Casteljau recurrence on all nodes at once, which
    stays stable for large n where binomial products overflow.
    """
    if int(n) != n or n < 1:
        raise InvalidInputError(f'Bernstein degree must be a positive integer, got {n}')
    if grid.a < 0.0 or grid.c > 1.0:
        raise InvalidInputError(f'Bernstein polynomials need a grid within [0, 1], got [{grid.a}, {grid.c}]')

    n = int(n)
    coeffs = np.array([f(i / n) for i in range(n + 1)], dtype=float)
    t = grid.nodes[:, None]
    b = np.broadcast_to(coeffs, (grid.N, n + 1)).copy()
    for j in range(n, 0, -1):
        b[:, :j] = (1.0 - t) * b[:, :j] + t * b[:, 1:j + 1]
    return GridFn(grid, b[:, 0])
