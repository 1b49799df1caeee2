import logging
import numpy as np
# Import custom modules
from utils import InvalidInputError, MembershipError
from linalg.matrix import as_mat, orth_projector
from function_space.grid import Grid, GridFn, l2_inner, diff, cumulative_integral
from descriptor.system import DescriptorSystem, RhsPair, AdjointElement

logger = logging.getLogger(__name__)

# Boundary and kernel conditions F'z(c) = 0, F'd = 0
BC_TOL = 1e-8
# Upper bound on ||d/dt F x||_2 accepted by the membership screen
DERIVATIVE_BOUND = 1e4
# Derivative norm growth under h -> h/2 that marks a jump (smooth ~ 1, jump ~ sqrt(2))
GROWTH_THRESHOLD = 1.25

def _check_grid(system: DescriptorSystem, u: GridFn, dim: int, name: str):
    if u.grid != system.grid:
        raise InvalidInputError(f'{name} lives on {u.grid}, system on {system.grid}')
    if u.dim != dim:
        raise InvalidInputError(f'{name} has dim {u.dim}, expected {dim}')

def _component_norms(values: np.ndarray, h: float) -> np.ndarray:
    sq = values ** 2
    return np.sqrt(h * (sq.sum(axis=0) - 0.5 * (sq[0] + sq[-1])))

def membership_W2F(F, x: GridFn, derivative_bound: float = DERIVATIVE_BOUND,
                   growth_threshold: float = GROWTH_THRESHOLD):
    """
    Grid screen for x in W_2^F: t -> F x(t) absolutely continuous with an
    L2 derivative.

    This is a necessary-style heuristic, not a proof. A component fails when
    its discrete derivative has infinite variation, exceeds derivative_bound
    in L2, or grows like h^(-1/2) when the grid is halved (a jump).

    Returns:
        passed (bool)
        diagnostics (dict): per-component derivative norms, total variation, growth ratios
    """
    F = as_mat(F, 'F')
    if x.dim != F.shape[1]:
        raise InvalidInputError(f'x has dim {x.dim}, F has {F.shape[1]} columns')

    Fx = x.apply(F)
    dFx = diff(Fx).values
    norms = _component_norms(dFx, x.grid.h)
    variation = np.abs(np.diff(dFx, axis=0)).sum(axis=0)

    growth = np.ones_like(norms)
    coarse_values = Fx.values[::2]
    if coarse_values.shape[0] >= 3:
        coarse_grid = Grid(x.grid.a, x.grid.a + 2 * x.grid.h * (coarse_values.shape[0] - 1), coarse_values.shape[0])
        coarse_dFx = diff(GridFn(coarse_grid, coarse_values)).values
        coarse_norms = _component_norms(coarse_dFx, coarse_grid.h)
        # Components with negligible derivative on both grids count as flat
        floor = 1e-12 * (1.0 + np.abs(Fx.values).max())
        active = coarse_norms > floor
        growth[active] = norms[active] / coarse_norms[active]

    finite = np.isfinite(norms) & np.isfinite(variation)
    bounded = norms <= derivative_bound
    no_jump = growth < growth_threshold
    passed = bool(np.all(finite & bounded & no_jump))

    diagnostics = {
        'derivative_norms': norms.tolist(),
        'total_variation': variation.tolist(),
        'growth_ratios': growth.tolist(),
        'derivative_bound': derivative_bound,
        'growth_threshold': growth_threshold,
    }
    return passed, diagnostics

def apply_D(system: DescriptorSystem, x: GridFn, check_membership: bool = True) -> RhsPair:
    """
    D x = (d/dt F x - C x, F x(a)).
    """
    _check_grid(system, x, system.n, 'x')
    if check_membership:
        passed, diagnostics = membership_W2F(system.F, x)
        if not passed:
            logger.warning(f'x failed the W_2^F screen; D x is computed anyway: {diagnostics}')

    f = diff(x.apply(system.F)) - x.apply_field(system.C_values)
    f0 = system.F @ x.values[0]
    return RhsPair(f, f0)

def residual_integral_form(system: DescriptorSystem, x: GridFn, rhs: RhsPair) -> float:
    """
    max_i || F x(t_i) - f0 - int_a^t_i (C x + f) ||_inf, the Volterra-form defect.
    """
    _check_grid(system, x, system.n, 'x')
    _check_grid(system, rhs.f, system.m, 'f')
    integral = cumulative_integral(x.apply_field(system.C_values) + rhs.f)
    defect = x.apply(system.F).values - rhs.f0[None, :] - integral.values
    return float(np.abs(defect).max())

def membership_adjoint(system: DescriptorSystem, el: AdjointElement, tol: float = BC_TOL):
    """
    Domain test for the adjoint: z in W_2^F', F'z(c) = 0 and
    d := z0 - P z(a) with F'd = 0, where P = F'^+ F'.
    """
    _check_grid(system, el.z, system.m, 'z')
    Ft = system.F.T
    passed_w, diagnostics = membership_W2F(Ft, el.z)

    terminal = float(np.abs(Ft @ el.z.values[-1]).max())
    P = orth_projector(Ft)
    d = el.z0 - P @ el.z.values[0]
    kernel = float(np.abs(Ft @ d).max())

    diagnostics.update({
        'terminal_defect': terminal,
        'kernel_defect': kernel,
        'd': d.tolist(),
        'tol': tol,
    })
    passed = passed_w and terminal <= tol and kernel <= tol
    return passed, diagnostics

def apply_D_adjoint(system: DescriptorSystem, el: AdjointElement, check_membership: bool = True) -> GridFn:
    """
    D'(z, z0) = -d/dt F'z - C'z.
    """
    if check_membership:
        passed, diagnostics = membership_adjoint(system, el)
        if not passed:
            raise MembershipError('(z, z0) is outside the adjoint domain', diagnostics)
    else:
        _check_grid(system, el.z, system.m, 'z')

    Ct = np.transpose(system.C_values, (0, 2, 1))
    return -diff(el.z.apply(system.F.T)) - el.z.apply_field(Ct)

def boundary_bracket(F, x: GridFn, z: GridFn) -> float:
    """
    (F x(c), P z(c)) - (F x(a), P z(a)) with P = F'^+ F'.
    """
    F = as_mat(F, 'F')
    P = orth_projector(F.T)
    Fx = x.values @ F.T
    Pz = z.values @ P.T
    return float(Fx[-1] @ Pz[-1] - Fx[0] @ Pz[0])

def ibp_residual(F, x: GridFn, z: GridFn) -> float:
    """
    Defect of the integration-by-parts identity for x in W_2^F, z in W_2^F'.
    """
    F = as_mat(F, 'F')
    if x.grid != z.grid:
        raise InvalidInputError(f'x and z live on different grids: {x.grid} vs {z.grid}')
    if x.dim != F.shape[1] or z.dim != F.shape[0]:
        raise InvalidInputError(f'Expected x of dim {F.shape[1]} and z of dim {F.shape[0]}, got {x.dim} and {z.dim}')

    integral = l2_inner(diff(x.apply(F)), z) + l2_inner(diff(z.apply(F.T)), x)
    return abs(integral - boundary_bracket(F, x, z))

def adjoint_pairing_residual(system: DescriptorSystem, x: GridFn, el: AdjointElement) -> float:
    """
    | <D x, (z, z0)> - <x, D'(z, z0)> | on the stated domains.
    """
    passed, diagnostics = membership_W2F(system.F, x)
    if not passed:
        raise MembershipError('x failed the W_2^F screen', diagnostics)
    passed, diagnostics = membership_adjoint(system, el)
    if not passed:
        raise MembershipError('(z, z0) is outside the adjoint domain', diagnostics)

    Dx = apply_D(system, x, check_membership=False)
    lhs = l2_inner(Dx.f, el.z) + float(Dx.f0 @ el.z0)
    rhs = l2_inner(x, apply_D_adjoint(system, el, check_membership=False))
    return abs(lhs - rhs)
