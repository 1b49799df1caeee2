from dataclasses import dataclass
from functools import cached_property
import numpy as np
# Import custom modules
from utils import InvalidInputError, float_array
from linalg.matrix import as_mat
from function_space.grid import Grid, GridFn

#===================================#
#======Time-dependent sources=======#
#===================================#

class Source:
    """
    Array-valued function of time, evaluated on a node array.
    evaluate(t) returns shape (len(t),) + self.shape.
    """
    shape: tuple = ()
    kind: str = 'source'

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False

class ConstantSource(Source):
    kind = 'constant'

    def __init__(self, value):
        self.value = float_array(value, 'constant source')
        self.shape = self.value.shape

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self.value, t.shape + self.shape).copy()

    @property
    def is_constant(self):
        return True

class PolySource(Source):
    """
    sum_i M_i t^i with array coefficients, evaluated by nested multiplication.
    """
    kind = 'poly'

    def __init__(self, coeffs):
        coeffs = [float_array(M, 'polynomial coefficient') for M in coeffs]
        if len(coeffs) == 0:
            raise InvalidInputError('Polynomial source needs at least one coefficient')
        shape = coeffs[0].shape
        if any(M.shape != shape for M in coeffs):
            raise InvalidInputError('Polynomial coefficients must share one shape')
        self.coeffs = coeffs
        self.shape = shape

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        tt = t.reshape(t.shape + (1,) * len(self.shape))
        out = np.broadcast_to(self.coeffs[-1], t.shape + self.shape).copy()
        for M in reversed(self.coeffs[:-1]):
            out = out * tt + M
        return out

    @property
    def is_constant(self):
        return all(not np.any(M) for M in self.coeffs[1:])

class SampledSource(Source):
    """
    Per-node samples on a fixed grid. Evaluation at the grid's own nodes is
    exact; other node sets are served by piecewise-linear interpolation.
    """
    kind = 'samples'

    def __init__(self, grid: Grid, samples):
        samples = float_array(samples, 'samples')
        if samples.shape[0] != grid.N:
            raise InvalidInputError(f'Expected {grid.N} samples, got {samples.shape[0]}')
        self.grid = grid
        self.samples = samples
        self.shape = samples.shape[1:]

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        if t.shape == self.grid.nodes.shape and np.array_equal(t, self.grid.nodes):
            return self.samples.copy()
        flat = self.samples.reshape(self.grid.N, -1)
        cols = [np.interp(t, self.grid.nodes, flat[:, j]) for j in range(flat.shape[1])]
        return np.stack(cols, axis=-1).reshape(t.shape + self.shape)

    @property
    def is_constant(self):
        return bool(np.all(self.samples == self.samples[0]))

class CallableSource(Source):
    """
    Programmatic source; fn(t) must return an array of shape (len(t),) + shape.
    """
    kind = 'callable'

    def __init__(self, fn, shape):
        self.fn = fn
        self.shape = tuple(shape)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.fn(t), dtype=float)
        return np.broadcast_to(out, t.shape + self.shape).copy()

def as_source(value) -> Source:
    if isinstance(value, Source):
        return value
    return ConstantSource(value)

#===================================#
#===========Domain types============#
#===================================#

@dataclass(frozen=True, eq=False)
class DescriptorSystem:
    """
    d/dt F x(t) - C(t) x(t) = f(t), F x(a) = f0 on the interval of grid.
    """
    F: np.ndarray
    C: Source
    grid: Grid

    def __post_init__(self):
        F = as_mat(self.F, 'F')
        F.flags.writeable = False
        object.__setattr__(self, 'F', F)
        object.__setattr__(self, 'C', as_source(self.C))
        if tuple(self.C.shape) != F.shape:
            raise InvalidInputError(f'C(t) has shape {self.C.shape}, F has shape {F.shape}')
        if not np.all(np.isfinite(self.C_values)):
            raise InvalidInputError('C(t) is not finite at every node')

    @property
    def m(self) -> int:
        return self.F.shape[0]

    @property
    def n(self) -> int:
        return self.F.shape[1]

    @cached_property
    def C_values(self) -> np.ndarray:
        values = self.C.evaluate(self.grid.nodes)
        values.flags.writeable = False
        return values

    @property
    def is_constant(self) -> bool:
        return self.C.is_constant

    def with_grid(self, grid: Grid) -> 'DescriptorSystem':
        if grid == self.grid:
            return self
        return DescriptorSystem(self.F, self.C, grid)

@dataclass(frozen=True, eq=False)
class RhsPair:
    """
    Right-hand side (f, f0) of D x = (f, f0).
    """
    f: GridFn
    f0: np.ndarray

    def __post_init__(self):
        f0 = float_array(self.f0, 'f0').reshape(-1)
        if f0.shape[0] != self.f.dim:
            raise InvalidInputError(f'f0 has length {f0.shape[0]}, f has dim {self.f.dim}')
        if not np.all(np.isfinite(f0)):
            raise InvalidInputError('f0 has non-finite entries')
        f0.flags.writeable = False
        object.__setattr__(self, 'f0', f0)

    @property
    def grid(self) -> Grid:
        return self.f.grid

    @classmethod
    def zeros(cls, grid: Grid, m: int) -> 'RhsPair':
        return cls(GridFn.zeros(grid, m), np.zeros(m))

    def on(self, grid: Grid) -> 'RhsPair':
        if grid == self.grid:
            return self
        return RhsPair(self.f.resample(grid), self.f0)

@dataclass(frozen=True, eq=False)
class RhsSource:
    """
    Right-hand side whose f is a Source, so it can be sampled on any grid.
    """
    f: Source
    f0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'f', as_source(self.f))
        f0 = float_array(self.f0, 'f0').reshape(-1)
        if tuple(self.f.shape) != (f0.shape[0],):
            raise InvalidInputError(f'f has shape {self.f.shape}, f0 has length {f0.shape[0]}')
        if not np.all(np.isfinite(f0)):
            raise InvalidInputError('f0 has non-finite entries')
        object.__setattr__(self, 'f0', f0)

    def on(self, grid: Grid) -> RhsPair:
        return RhsPair(GridFn(grid, self.f.evaluate(grid.nodes)), self.f0)

@dataclass(frozen=True, eq=False)
class AdjointElement:
    """
    Element (z, z0) of the adjoint's domain candidate set.
    """
    z: GridFn
    z0: np.ndarray

    def __post_init__(self):
        z0 = float_array(self.z0, 'z0').reshape(-1)
        if z0.shape[0] != self.z.dim:
            raise InvalidInputError(f'z0 has length {z0.shape[0]}, z has dim {self.z.dim}')
        if not np.all(np.isfinite(z0)):
            raise InvalidInputError('z0 has non-finite entries')
        z0.flags.writeable = False
        object.__setattr__(self, 'z0', z0)

    @classmethod
    def zeros(cls, grid: Grid, m: int) -> 'AdjointElement':
        return cls(GridFn.zeros(grid, m), np.zeros(m))
