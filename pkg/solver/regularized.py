# Import modules
import logging
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor
import numpy as np
from tqdm import tqdm
from scipy.sparse import linalg as spla
# Import custom modules
from utils import InvalidInputError, SolveError, write_log
from linalg.matrix import RANK_RTOL
from function_space.grid import GridFn, l2_norm
from descriptor.system import DescriptorSystem
from solver.utils import BlockAssembler, coupled_grid_size, range_kernel_bases, GRID_MAX

module_logger = logging.getLogger(__name__)

# Backward-error threshold separating solver failure from modelling divergence
SOLVE_TOL = 1e-8
# Boundedness heuristic of the probe
DELTA_REL = 0.05
GAMMA = 1.5
DEFAULT_SCHEDULE = (0.5, 0.5, 8)

@dataclass
class RegSolution:
    eps: float
    x: GridFn
    z: GridFn
    d: np.ndarray
    residual: float
    condition: float = float('nan')

    @property
    def grid_n(self) -> int:
        return self.x.grid.N

@dataclass
class ProbeReport:
    eps_schedule: list
    norms: list
    verdict: str
    estimate: GridFn = None
    grid_sizes: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    capped: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    solutions: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            'eps_schedule': [float(e) for e in self.eps_schedule],
            'norms': [float(v) for v in self.norms],
            'verdict': self.verdict,
            'grid_sizes': [int(v) for v in self.grid_sizes],
            'residuals': [float(v) for v in self.residuals],
            'capped': [bool(v) for v in self.capped],
            'failures': self.failures,
        }

def assemble_regularized(system: DescriptorSystem, rhs, eps: float, rtol: float = RANK_RTOL):
    """
    Global trapezoidal discretization of

        d/dt F x = C x + z + f,
        d/dt F'z = -C'z + eps^2 x,  F'z(c) = 0,
        F x(a) - P z(a) + d = f0,   F'd = 0.

    The range(F) / range(F') parts of both relations are averaged over each
    interval; their ker(F') / ker(F) parts are algebraic and are imposed at
    every node. Unknowns are ordered (x_0..x_{N-1}, z_0..z_{N-1}, d).

    Returns:
        A (scipy.sparse.csc_matrix): square system matrix
        b (np.ndarray): right-hand side
    """
    grid = system.grid
    N, h = grid.N, grid.h
    m, n = system.m, system.n
    F = np.asarray(system.F)
    Cs = np.asarray(system.C_values)
    Cts = np.transpose(Cs, (0, 2, 1))
    f = rhs.f.values
    K = N - 1

    Ur, U0, Wr, W0, r = range_kernel_bases(F, rtol)
    P = Ur @ Ur.T

    ox, oz, od = 0, N * n, N * (n + m)
    size = od + m
    asm = BlockAssembler((size, size))
    b = np.zeros(size)
    row = 0

    # x-relation, differential part
    if r:
        asm.add_blocks(np.einsum('pm,kmn->kpn', Ur.T, -F / h - 0.5 * Cs[:-1]), row, ox, r, n)
        asm.add_blocks(np.einsum('pm,kmn->kpn', Ur.T, F / h - 0.5 * Cs[1:]), row, ox + n, r, n)
        asm.add_blocks(np.broadcast_to(-0.5 * Ur.T, (K, r, m)), row, oz, r, m)
        asm.add_blocks(np.broadcast_to(-0.5 * Ur.T, (K, r, m)), row, oz + m, r, m)
        b[row:row + K * r] = (0.5 * (f[:-1] + f[1:]) @ Ur).ravel()
        row += K * r

    # x-relation, algebraic part: U0'(C x + z) = -U0' f at each node
    q = m - r
    if q:
        asm.add_blocks(np.einsum('pm,kmn->kpn', U0.T, Cs), row, ox, q, n)
        asm.add_blocks(np.broadcast_to(U0.T, (N, q, m)), row, oz, q, m)
        b[row:row + N * q] = (-f @ U0).ravel()
        row += N * q

    # z-relation, differential part
    if r:
        asm.add_blocks(np.einsum('pn,knm->kpm', Wr.T, -F.T / h + 0.5 * Cts[:-1]), row, oz, r, m)
        asm.add_blocks(np.einsum('pn,knm->kpm', Wr.T, F.T / h + 0.5 * Cts[1:]), row, oz + m, r, m)
        asm.add_blocks(np.broadcast_to(-0.5 * eps ** 2 * Wr.T, (K, r, n)), row, ox, r, n)
        asm.add_blocks(np.broadcast_to(-0.5 * eps ** 2 * Wr.T, (K, r, n)), row, ox + n, r, n)
        row += K * r

    # z-relation, algebraic part: W0'(-C'z + eps^2 x) = 0 at each node
    q = n - r
    if q:
        asm.add_blocks(np.einsum('pn,knm->kpm', W0.T, -Cts), row, oz, q, m)
        asm.add_blocks(np.broadcast_to(eps ** 2 * W0.T, (N, q, n)), row, ox, q, n)
        row += N * q

    # F'z(c) = 0
    if r:
        asm.add_blocks(Ur.T, row, oz + (N - 1) * m, 0, 0)
        row += r

    # F x(a) - P z(a) + d = f0
    asm.add_blocks(F, row, ox, 0, 0)
    asm.add_blocks(-P, row, oz, 0, 0)
    asm.add_blocks(np.eye(m), row, od, 0, 0)
    b[row:row + m] = rhs.f0
    row += m

    # F'd = 0
    if r:
        asm.add_blocks(Ur.T, row, od, 0, 0)
        row += r

    assert row == size
    return asm.tocsc(), b

def _backward_error(A, u: np.ndarray, b: np.ndarray) -> float:
    denom = spla.norm(A) * np.linalg.norm(u) + np.linalg.norm(b)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(A @ u - b) / denom)

def _condition_estimate(A, lu) -> float:
    try:
        inv = spla.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda v: lu.solve(v, trans='T'),
                                  dtype=float)
        return float(spla.onenormest(A) * spla.onenormest(inv))
    except Exception:
        return float('nan')

def solve_regularized(system: DescriptorSystem, rhs, eps: float, tol: float = SOLVE_TOL,
                      rtol: float = RANK_RTOL) -> RegSolution:
    """
    Solve the eps-regularized boundary value problem on system.grid.

    Sparse LU first; a singular factorization falls back to LSQR. The
    reported residual is the normwise backward error of the discrete system.

    Raises:
        SolveError: residual above tol (grid too coarse for eps, typically)
    """
    if not eps > 0:
        raise InvalidInputError(f'eps must be positive, got {eps}')
    rhs = rhs.on(system.grid)
    if rhs.f.dim != system.m:
        raise InvalidInputError(f'f has dim {rhs.f.dim}, system has m={system.m}')

    A, b = assemble_regularized(system, rhs, eps, rtol=rtol)
    condition = float('nan')
    try:
        lu = spla.splu(A)
        u = lu.solve(b)
        condition = _condition_estimate(A, lu)
    except RuntimeError as e:
        module_logger.warning(f'Sparse LU failed at eps={eps}, N={system.grid.N} ({e}); falling back to LSQR')
        u = spla.lsqr(A, b, atol=1e-14, btol=1e-14, iter_lim=20 * A.shape[0])[0]

    residual = _backward_error(A, u, b)
    if not np.all(np.isfinite(u)) or residual > tol:
        raise SolveError(f'Regularized solve failed at eps={eps}, N={system.grid.N}: residual {residual:.3e}',
                         residual=residual, condition=condition, eps=eps, grid_n=system.grid.N)

    N, m, n = system.grid.N, system.m, system.n
    x = GridFn(system.grid, u[:N * n].reshape(N, n))
    z = GridFn(system.grid, u[N * n:N * (n + m)].reshape(N, m))
    d = u[N * (n + m):]
    return RegSolution(eps=eps, x=x, z=z, d=d, residual=residual, condition=condition)

def classify_norms(norms, delta_rel: float = DELTA_REL, gamma: float = GAMMA) -> str:
    """
    Verdict from the last three norms: 'bounded' when consecutive relative
    changes stay within delta_rel, 'diverging' when each step grows by at
    least gamma, otherwise 'inconclusive'.
    """
    last = np.asarray(norms[-3:], dtype=float)
    if last.shape[0] < 3 or not np.all(np.isfinite(last)):
        return 'inconclusive'
    steps = np.abs(np.diff(last))
    if np.all(steps <= delta_rel * last[:-1]):
        return 'bounded'
    if np.all(last[1:] >= gamma * last[:-1]) and last[0] > 0:
        return 'diverging'
    return 'inconclusive'

def pseudosolution_probe(system: DescriptorSystem, rhs, eps0: float = DEFAULT_SCHEDULE[0],
                         ratio: float = DEFAULT_SCHEDULE[1], steps: int = DEFAULT_SCHEDULE[2],
                         grid_max: int = GRID_MAX, delta_rel: float = DELTA_REL, gamma: float = GAMMA,
                         num_workers: int = 1, logger=None) -> ProbeReport:
    """
    Track ||x(., eps_k)||_2 along eps_k = eps0 * ratio^k with the grid refined
    as N_k ~ 1/eps_k. A bounded trace is evidence that a pseudosolution
    exists; the last x is then returned as its estimate.

    Failed or capped steps among the last three make the verdict inconclusive.
    """
    if not eps0 > 0:
        raise InvalidInputError(f'eps0 must be positive, got {eps0}')
    if not 0 < ratio < 1:
        raise InvalidInputError(f'ratio must lie in (0, 1), got {ratio}')
    if steps < 3:
        raise InvalidInputError(f'steps must be at least 3, got {steps}')

    schedule = [eps0 * ratio ** k for k in range(steps)]
    plan = [coupled_grid_size(system.grid, eps, grid_max=grid_max) for eps in schedule]

    def run_step(k):
        eps = schedule[k]
        grid_k = system.grid.refine(plan[k][0])
        try:
            return solve_regularized(system.with_grid(grid_k), rhs, eps)
        except SolveError as e:
            return e

    if num_workers > 1:
        with ThreadPoolExecutor(max_workers=num_workers) as pool:
            outcomes = list(pool.map(run_step, range(steps)))
    else:
        outcomes = [run_step(k) for k in tqdm(range(steps), bar_format='{l_bar}{bar:30}{r_bar}{bar:-2b}',
                                             disable=logger is None)]

    report = ProbeReport(eps_schedule=schedule, norms=list(), verdict='inconclusive')
    for k, outcome in enumerate(outcomes):
        N_k, capped = plan[k]
        report.grid_sizes.append(N_k)
        report.capped.append(capped)
        if isinstance(outcome, SolveError):
            report.norms.append(float('nan'))
            report.residuals.append(float(outcome.residual))
            report.failures.append({'step': k, 'eps': schedule[k], 'message': str(outcome)})
            report.solutions.append(None)
            write_log(logger, f'[eps={schedule[k]:.3e}][N={N_k}] solve failed: {outcome}')
            continue
        norm = l2_norm(outcome.x)
        report.norms.append(norm)
        report.residuals.append(outcome.residual)
        report.solutions.append(outcome)
        write_log(logger, f'[eps={schedule[k]:.3e}][N={N_k}] ||x||_2 = {norm:.6e} | residual = {outcome.residual:.2e}')

    if any(report.capped[-3:]):
        module_logger.warning(f'Grid cap {grid_max} bound on the last steps; verdict is inconclusive')
        report.verdict = 'inconclusive'
    else:
        report.verdict = classify_norms(report.norms, delta_rel=delta_rel, gamma=gamma)

    if report.verdict == 'bounded':
        report.estimate = report.solutions[-1].x
    return report
