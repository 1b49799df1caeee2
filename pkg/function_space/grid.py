from dataclasses import dataclass
from functools import cached_property
import numpy as np
import pandas as pd
from scipy.integrate import trapezoid, cumulative_trapezoid
# Import custom modules
from utils import InvalidInputError

@dataclass(frozen=True)
class Grid:
    """
    Uniform grid t_i = a + i*h, i = 0..N-1, over [a, c].
    """
    a: float
    c: float
    N: int

    def __post_init__(self):
        try:
            a, c = float(self.a), float(self.c)
            N = float(self.N)
        except (TypeError, ValueError):
            raise InvalidInputError(f'Grid needs numeric a, c and N, got [{self.a!r}, {self.c!r}], N={self.N!r}') from None
        if not (np.isfinite(a) and np.isfinite(c)) or not a < c:
            raise InvalidInputError(f'Grid needs finite a < c, got [{a}, {c}]')
        if not N.is_integer() or N < 3:
            raise InvalidInputError(f'Grid needs N >= 3 nodes, got {self.N}')
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'c', c)
        object.__setattr__(self, 'N', int(N))

    @property
    def h(self) -> float:
        return (self.c - self.a) / (self.N - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.linspace(self.a, self.c, self.N)
        t.flags.writeable = False
        return t

    def refine(self, N: int) -> 'Grid':
        return Grid(self.a, self.c, N)

@dataclass(frozen=True, eq=False)
class GridFn:
    """
    Vector-valued function sampled on a Grid; values has shape (N, dim).
    Immutable after construction.
    """
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] != self.grid.N or arr.shape[1] < 1:
            raise InvalidInputError(f'GridFn values must have shape ({self.grid.N}, dim), got {arr.shape}')
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError('GridFn values have non-finite entries')
        arr.flags.writeable = False
        object.__setattr__(self, 'values', arr)

    @classmethod
    def from_callable(cls, grid: Grid, *components) -> 'GridFn':
        """
        Sample scalar functions of t, one per component. Each must accept
        the node array; constants broadcast.
        """
        t = grid.nodes
        cols = [np.broadcast_to(np.asarray(comp(t), dtype=float), t.shape) for comp in components]
        return cls(grid, np.column_stack(cols))

    @classmethod
    def zeros(cls, grid: Grid, dim: int) -> 'GridFn':
        return cls(grid, np.zeros((grid.N, dim)))

    @classmethod
    def stack(cls, *fns: 'GridFn') -> 'GridFn':
        grid = fns[0].grid
        for fn in fns[1:]:
            _check_same_grid(fns[0], fn)
        return cls(grid, np.hstack([fn.values for fn in fns]))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def component(self, i: int) -> 'GridFn':
        return GridFn(self.grid, self.values[:, i])

    def apply(self, M) -> 'GridFn':
        """
        Node-wise product with a constant matrix, t -> M u(t).
        """
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if M.shape[1] != self.dim:
            raise InvalidInputError(f'Matrix with {M.shape[1]} columns cannot act on dim {self.dim}')
        return GridFn(self.grid, self.values @ M.T)

    def apply_field(self, Ms: np.ndarray) -> 'GridFn':
        """
        Node-wise product with matrix samples Ms of shape (N, p, dim).
        """
        if Ms.ndim != 3 or Ms.shape[0] != self.grid.N or Ms.shape[2] != self.dim:
            raise InvalidInputError(f'Matrix field of shape {Ms.shape} cannot act on ({self.grid.N}, {self.dim})')
        return GridFn(self.grid, np.einsum('ipq,iq->ip', Ms, self.values))

    def resample(self, grid: Grid) -> 'GridFn':
        """
        Piecewise-linear resampling onto another grid over the same interval.
        """
        if grid == self.grid:
            return self
        if not (np.isclose(grid.a, self.grid.a) and np.isclose(grid.c, self.grid.c)):
            raise InvalidInputError(f'Cannot resample from [{self.grid.a}, {self.grid.c}] to [{grid.a}, {grid.c}]')
        cols = [np.interp(grid.nodes, self.nodes, self.values[:, j]) for j in range(self.dim)]
        return GridFn(grid, np.column_stack(cols))

    def to_frame(self, prefix: str = 'v') -> pd.DataFrame:
        data = {'t': self.nodes}
        for j in range(self.dim):
            data[f'{prefix}{j + 1}'] = self.values[:, j]
        return pd.DataFrame(data)

    def to_csv(self, path: str, prefix: str = 'v'):
        self.to_frame(prefix).to_csv(path, index=False, float_format='%.17g')

    @classmethod
    def from_csv(cls, path: str) -> 'GridFn':
        dat = pd.read_csv(path)
        if dat.columns[0] != 't' or dat.shape[1] < 2:
            raise InvalidInputError(f'{path}: expected header t,v1,...,vdim')
        t = dat['t'].to_numpy(dtype=float)
        grid = Grid(t[0], t[-1], len(t))
        if not np.allclose(t, grid.nodes, rtol=0, atol=1e-9 * grid.h):
            raise InvalidInputError(f'{path}: nodes are not uniformly spaced')
        return cls(grid, dat.iloc[:, 1:].to_numpy(dtype=float))

    def __add__(self, other: 'GridFn') -> 'GridFn':
        _check_same_shape(self, other)
        return GridFn(self.grid, self.values + other.values)

    def __sub__(self, other: 'GridFn') -> 'GridFn':
        _check_same_shape(self, other)
        return GridFn(self.grid, self.values - other.values)

    def __neg__(self) -> 'GridFn':
        return GridFn(self.grid, -self.values)

    def __mul__(self, alpha: float) -> 'GridFn':
        return GridFn(self.grid, float(alpha) * self.values)

    __rmul__ = __mul__

def _check_same_grid(u: GridFn, v: GridFn):
    if u.grid != v.grid:
        raise InvalidInputError(f'Grid mismatch: {u.grid} vs {v.grid}')

def _check_same_shape(u: GridFn, v: GridFn):
    _check_same_grid(u, v)
    if u.dim != v.dim:
        raise InvalidInputError(f'Dimension mismatch: {u.dim} vs {v.dim}')

def l2_inner(u: GridFn, v: GridFn) -> float:
    """
    Trapezoidal approximation of the L2 inner product over [a, c].
    """
    _check_same_shape(u, v)
    pointwise = np.einsum('ij,ij->i', u.values, v.values)
    return float(trapezoid(pointwise, dx=u.grid.h))

def l2_norm(u: GridFn) -> float:
    return float(np.sqrt(max(l2_inner(u, u), 0.0)))

def sup_distance(u: GridFn, v: GridFn) -> float:
    _check_same_shape(u, v)
    return float(np.abs(u.values - v.values).max())

def diff(u: GridFn) -> GridFn:
    """
    Second-order d/dt: central differences inside, one-sided three-point
    stencils at both ends. Exact on quadratics.
    """
    return GridFn(u.grid, np.gradient(u.values, u.grid.h, axis=0, edge_order=2))

def cumulative_integral(u: GridFn) -> GridFn:
    """
    t_i -> integral of u from a to t_i by the cumulative trapezoid rule.
    """
    return GridFn(u.grid, cumulative_trapezoid(u.values, dx=u.grid.h, axis=0, initial=0.0))
