import logging
from dataclasses import dataclass
import numpy as np
# Import custom modules
from utils import InvalidInputError, StepSizeError, LogSpaceOverflowError
from function_space.grid import Grid, GridFn

logger = logging.getLogger(__name__)

# Upper end of the eps range on which the Riccati bounds are asserted
RICCATI_EPS_MAX = 1.0

def riccati_bounds(eps: float):
    """
    Roots (k-, k+) of U(k) = 2k + (1 + eps^-2) - (1 + eps^2) k^2.
    """
    e2 = eps ** 2
    root = np.sqrt(e2 + 3 * e2 ** 2 + e2 ** 3)
    den = e2 + e2 ** 2
    return (e2 - root) / den, (e2 + root) / den

def riccati_rhs(k, eps: float):
    return 2 * k + (1 + eps ** -2) - (1 + eps ** 2) * k ** 2

def _riccati_factored(k, eps: float, k_minus: float, k_plus: float):
    # Same polynomial as riccati_rhs; vanishes exactly at k+ in floating point
    return (1 + eps ** 2) * (k - k_minus) * (k_plus - k)

def riccati_sweep(eps: float, grid: Grid, k0: float = 1.0, eps_max: float = RICCATI_EPS_MAX) -> GridFn:
    """
    Classical RK4 for k' = U(k), k(t0) = k0 on the nodes of grid.

    Raises:
        StepSizeError: k left [k- - 1, k+ + 1]; refine the grid
    """
    if not eps > 0:
        raise InvalidInputError(f'eps must be positive, got {eps}')
    if eps >= eps_max:
        logger.warning(f'eps={eps} is outside (0, {eps_max}) where the Riccati bounds are asserted')

    k_minus, k_plus = riccati_bounds(eps)
    lo, hi = k_minus - 1.0, k_plus + 1.0
    h = grid.h
    U = lambda k: _riccati_factored(k, eps, k_minus, k_plus)

    k = np.empty(grid.N)
    k[0] = k0
    for i in range(grid.N - 1):
        ki = k[i]
        s1 = U(ki)
        s2 = U(ki + 0.5 * h * s1)
        s3 = U(ki + 0.5 * h * s2)
        s4 = U(ki + h * s3)
        k[i + 1] = ki + h / 6.0 * (s1 + 2 * s2 + 2 * s3 + s4)
        if not (lo <= k[i + 1] <= hi):
            raise StepSizeError(f'Riccati sweep left [{lo:.4g}, {hi:.4g}] at node {i + 1} (k={k[i + 1]:.4g}); '
                                f'refine the grid (N={grid.N})', node=i + 1, value=float(k[i + 1]),
                                eps=eps, grid_n=grid.N)
    return GridFn(grid, k)

def example1_log_q(eps: float, grid: Grid) -> np.ndarray:
    """
    log q(t, eps) from the two-exponential closed form, q(t0) = 1.

    q = exp(int (1 + eps^2) k) solves q'' - 2q' - (1 + eps^-2)(1 + eps^2) q = 0
    with q'(t0) = 1 + eps^2.
    """
    if not eps > 0:
        raise InvalidInputError(f'eps must be positive, got {eps}')
    e2 = eps ** 2
    root = np.sqrt(e2 + 3 * e2 ** 2 + e2 ** 3)
    lam_up, lam_down = (e2 + root) / e2, (e2 - root) / e2
    c_up = (e2 ** 2 + root) / (2 * root)
    c_down = (root - e2 ** 2) / (2 * root)

    s = grid.nodes - grid.a
    with np.errstate(over='raise', invalid='raise'):
        try:
            if c_down > 0:
                log_q = np.logaddexp(np.log(c_up) + lam_up * s, np.log(c_down) + lam_down * s)
            else:
                log_q = np.log(c_up) + lam_up * s + np.log1p(c_down / c_up * np.exp((lam_down - lam_up) * s))
        except FloatingPointError as e:
            raise LogSpaceOverflowError(f'log q overflows at eps={eps}: {e}', eps=eps, grid_n=grid.N)
    if not np.all(np.isfinite(log_q)):
        raise LogSpaceOverflowError(f'log q is not finite at eps={eps}', eps=eps, grid_n=grid.N)
    return log_q

@dataclass
class Example1ClosedForm:
    x1: GridFn
    x2: GridFn
    z: GridFn
    k: GridFn
    phi: GridFn
    log_q: np.ndarray

def _damped_integral(E: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """
    e^{-E_i} int_{t_0}^{t_i} e^E g by the trapezoid rule, accumulated one
    interval at a time so that only the step differences of E are exponentiated.
    """
    decay = np.exp(E[:-1] - E[1:])
    out = np.zeros_like(g)
    for i in range(g.shape[0] - 1):
        out[i + 1] = decay[i] * (out[i] + 0.5 * h * g[i]) + 0.5 * h * g[i + 1]
    return out

def example1_closed_form(eps: float, grid: Grid, f1: GridFn, f2: GridFn, f01: float,
                         k: GridFn = None) -> Example1ClosedForm:
    """
    Riccati-sweep representation of the regularized solution for
    F = diag(1, 0), C = [[1, -1], [1, 0]]:

        phi(t) = e^s / q(t) { f01 + int_t0^t q/e^s (f1 - k f2) },
        z(t)   = -q(t)/e^s int_t^T e^s/q (f2 + (1 + eps^2) phi),
        x1 = k z + phi,  x2 = -eps^-2 z,   with s = t - t0.

    All exponentials are formed as differences of log q, so nothing larger
    than the integrands themselves is ever materialised.
    """
    for name, fn in (('f1', f1), ('f2', f2)):
        if fn.grid != grid or fn.dim != 1:
            raise InvalidInputError(f'{name} must be a scalar GridFn on the given grid')
    if k is None:
        k = riccati_sweep(eps, grid)

    h = grid.h
    s = grid.nodes - grid.a
    log_q = example1_log_q(eps, grid)
    kk = k.values[:, 0]
    g1 = f1.values[:, 0] - kk * f2.values[:, 0]

    # phi
    E = log_q - s
    phi = f01 * np.exp(-E) + _damped_integral(E, g1, h)

    # z, integrated backwards from T
    g2 = f2.values[:, 0] + (1 + eps ** 2) * phi
    z = -_damped_integral(-E[::-1], g2[::-1], h)[::-1]

    x1 = kk * z + phi
    x2 = -z / eps ** 2
    return Example1ClosedForm(x1=GridFn(grid, x1), x2=GridFn(grid, x2), z=GridFn(grid, z),
                              k=k, phi=GridFn(grid, phi), log_q=log_q)
