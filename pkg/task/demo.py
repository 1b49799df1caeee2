# Import modules
import os
import numpy as np
import pandas as pd
from tqdm import tqdm
from time import time
# Import custom modules
from utils import get_task_logger, write_log
from linalg.matrix import mod_norm
from linalg.reduction import canonical_reduction, verify_reduction, pencil_regular, split_blocks
from function_space.grid import Grid, GridFn, l2_norm, sup_distance, diff
from function_space.cantor import cantor, cantor_fn, bernstein
from descriptor.system import AdjointElement
from descriptor.operator import apply_D_adjoint
from descriptor.catalog import (example1_system, example1_rhs, example2_reduced_system, EXAMPLE2_F, EXAMPLE2_C,
                                EXAMPLE2_L, EXAMPLE2_R, EXAMPLE2_C0_PRINTED)
from solver.regularized import solve_regularized
from solver.riccati import riccati_sweep, riccati_bounds, example1_closed_form
from solver.closed_range import closed_range_for_system, closed_range_criterion
from solver.utils import coupled_grid_size
from task.utils import write_summary, result_writing

EXAMPLE1_EPS = (0.3, 0.1, 0.03)
RICCATI_EPS = (0.5, 0.1, 0.01)
BERNSTEIN_DEGREES = (10, 50, 200)

def _strictly_decreasing(values) -> bool:
    return bool(np.all(np.diff(np.asarray(values)) < 0))

def demo_example1(args, logger, save_path: str) -> dict:
    grid = Grid(0.0, 1.0, args.grid)
    system = example1_system(grid)
    rhs = example1_rhs(t0=grid.a)

    rows = list()
    for eps in tqdm(EXAMPLE1_EPS, bar_format='{l_bar}{bar:30}{r_bar}{bar:-2b}'):
        N, _ = coupled_grid_size(grid, eps, grid_max=args.grid_max)
        system_k = system.with_grid(grid.refine(N))
        sol = solve_regularized(system_k, rhs, eps)
        f = rhs.on(system_k.grid).f
        closed = example1_closed_form(eps, system_k.grid, f.component(0), f.component(1), rhs.f0[0])

        x1, x2, z1 = sol.x.component(0), sol.x.component(1), sol.z.component(0)
        row = {
            'eps': eps,
            'grid_n': N,
            'x1_error': l2_norm(x1 + f.component(1)),
            'x2_norm': l2_norm(x2),
            'x1_closed_form_gap': l2_norm(x1 - closed.x1),
            'z1_closed_form_gap': l2_norm(z1 - closed.z),
            'residual': sol.residual,
        }
        rows.append(row)
        write_log(logger, f"[eps={eps}][N={N}] ||x1 + f2||_2 = {row['x1_error']:.4e} | ||x2||_2 = {row['x2_norm']:.4e} | "
                          f"closed-form gap = {row['x1_closed_form_gap']:.2e}")

    table = pd.DataFrame(rows)
    table.to_csv(os.path.join(save_path, 'convergence.csv'), index=False, float_format='%.17g')

    riccati = list()
    for eps in RICCATI_EPS:
        k = riccati_sweep(eps, grid).values[:, 0]
        k_minus, k_plus = riccati_bounds(eps)
        riccati.append({
            'eps': eps,
            'k_minus': k_minus,
            'k_plus': k_plus,
            'k_end': float(k[-1]),
            'within_bounds': bool(np.all((k > k_minus) & (k <= k_plus))),
            'nondecreasing': bool(np.all(np.diff(k) >= 0)),
        })
    write_log(logger, f"Riccati bounds hold: {all(r['within_bounds'] and r['nondecreasing'] for r in riccati)}")

    verdict = closed_range_for_system(system)
    write_log(logger, f'Closed-range criterion: bounded={verdict.bounded}, growth exponent {verdict.growth_exponent:.3f}')

    return {
        'convergence': rows,
        'x1_error_decreasing': _strictly_decreasing(table['x1_error']),
        'x2_norm_decreasing': _strictly_decreasing(table['x2_norm']),
        'riccati': riccati,
        'closed_range': verdict.summary(),
        'verdict': 'converging' if _strictly_decreasing(table['x1_error']) else 'inconclusive',
        'metric': float(table['x1_error'].iloc[-1]),
        'metric_name': 'x1_error',
    }

def demo_example2(args, logger, save_path: str) -> dict:
    printed_ok = verify_reduction(EXAMPLE2_F, EXAMPLE2_L, EXAMPLE2_R, 1)
    L, R, r = canonical_reduction(EXAMPLE2_F)
    computed_ok = verify_reduction(EXAMPLE2_F, L, R, r)
    write_log(logger, f'Printed (L, R) verified: {printed_ok} | computed pair verified: {computed_ok} (r={r})')

    F1 = EXAMPLE2_L @ EXAMPLE2_F @ EXAMPLE2_R
    C0 = EXAMPLE2_L @ EXAMPLE2_C @ EXAMPLE2_R
    c0_gap = mod_norm(C0 - EXAMPLE2_C0_PRINTED)
    write_log(logger, f'L C R = {C0.tolist()} (printed {EXAMPLE2_C0_PRINTED.tolist()}, mod-norm gap {c0_gap:.3g})')

    regular = pencil_regular(F1, C0)
    verdict = closed_range_criterion(split_blocks(C0, 1))
    write_log(logger, f'Pencil regular: {regular} | closed range: {verdict.bounded and verdict.algebraic_bounded}')

    # Adjoint of the reduced system on a smooth element with z1(T) = 0
    rng = np.random.default_rng(args.seed)
    a1, a2, b = rng.uniform(-1.0, 1.0, size=3)
    grid = Grid(0.0, 1.0, args.grid)
    reduced = example2_reduced_system(grid)
    z = GridFn.from_callable(grid, lambda t: (1.0 - t) * np.sin(3.0 * t + a1), lambda t: np.cos(2.0 * t + a2))
    el = AdjointElement(z, np.array([z.values[0, 0], b]))
    image = apply_D_adjoint(reduced, el)
    expected = GridFn.stack(-diff(z.component(0)) - z.component(1), GridFn.zeros(grid, 1))
    adjoint_gap = sup_distance(image, expected)
    second = float(np.abs(image.values[:, 1]).max())
    write_log(logger, f'Adjoint image vs (-dz1/dt - z2, 0): sup gap {adjoint_gap:.2e}, second component max {second:.1e}')

    range_closed = bool(verdict.bounded and verdict.algebraic_bounded)
    return {
        'printed_pair_verified': printed_ok,
        'computed_pair_verified': computed_ok,
        'computed_L': L,
        'computed_R': R,
        'rank': r,
        'F1': F1,
        'C0': C0,
        'C0_printed': EXAMPLE2_C0_PRINTED,
        'C0_printed_gap': c0_gap,
        'pencil_regular': regular,
        'range_closed': range_closed,
        'closed_range': verdict.summary(),
        'adjoint_gap': adjoint_gap,
        'adjoint_second_component': second,
        'verdict': 'closed' if range_closed else 'not_closed',
        'metric': verdict.sup_estimate,
        'metric_name': 'sup_estimate',
    }

def demo_cantor(args, logger, save_path: str) -> dict:
    grid = Grid(0.0, 1.0, args.grid)
    F = np.diag([1.0, 0.0])
    target = GridFn.stack(GridFn.zeros(grid, 1), cantor_fn(grid))

    rows = list()
    for n in tqdm(BERNSTEIN_DEGREES, bar_format='{l_bar}{bar:30}{r_bar}{bar:-2b}'):
        v = GridFn.stack(GridFn.zeros(grid, 1), bernstein(cantor, n, grid))
        row = {
            'n': n,
            'l2_distance': l2_norm(v - target),
            'sup_distance': sup_distance(v, target),
            'F_derivative_max': float(np.abs(diff(v.apply(F)).values).max()),
        }
        rows.append(row)
        write_log(logger, f"[n={n}] ||v_n - v||_2 = {row['l2_distance']:.4e} | sup = {row['sup_distance']:.4e} | "
                          f"max |d/dt F v_n| = {row['F_derivative_max']:.1e}")

    table = pd.DataFrame(rows)
    table.to_csv(os.path.join(save_path, 'bernstein.csv'), index=False, float_format='%.17g')

    decreasing = _strictly_decreasing(table['l2_distance'])
    return {
        'bernstein': rows,
        'l2_distance_decreasing': decreasing,
        'F_derivative_zero': bool((table['F_derivative_max'] == 0.0).all()),
        'verdict': 'converging' if decreasing else 'inconclusive',
        'metric': float(table['l2_distance'].iloc[-1]),
        'metric_name': 'l2_distance',
    }

DEMOS = {
    'example1': demo_example1,
    'example2': demo_example2,
    'cantor': demo_cantor,
}

def demo(args):

    #===================================#
    #==============Logging==============#
    #===================================#

    logger = get_task_logger(__name__)
    write_log(logger, f'Start demo {args.scenario}!')

    #===================================#
    #===============Demo================#
    #===================================#

    start_time = time()
    save_path = os.path.join(args.out, f'demo_{args.scenario}')
    payload = DEMOS[args.scenario](args, logger, save_path)
    write_log(logger, f'Demo finished | spend_time:{(time() - start_time) / 60:.2f}min')

    #===================================#
    #==============Saving===============#
    #===================================#

    verdict = payload.pop('verdict')
    metric, metric_name = payload.pop('metric'), payload.pop('metric_name')
    payload.update({'command': 'demo', 'scenario': args.scenario, 'verdict': verdict})
    fname = write_summary(args, save_path, payload)
    write_log(logger, f'Summary saved --> {fname}')
    result_writing(args, verdict=verdict, metric=metric, metric_name=metric_name)

    return 0
