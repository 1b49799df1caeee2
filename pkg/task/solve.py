# Import modules
import os
import numpy as np
from time import time
# Import custom modules
from utils import get_task_logger, write_log
from descriptor.operator import residual_integral_form
from function_space.grid import l2_norm
from solver.regularized import solve_regularized
from solver.utils import coupled_grid_size
from task.utils import load_system, load_rhs, save_solution_csv, write_summary, result_writing

def solve(args):

    #===================================#
    #==============Logging==============#
    #===================================#

    logger = get_task_logger(__name__)
    write_log(logger, 'Start solving!')

    #===================================#
    #=============Data Load=============#
    #===================================#

    write_log(logger, 'Load system...')
    start_time = time()
    system = load_system(args.system, args.grid)
    rhs = load_rhs(args.rhs, system.grid)
    write_log(logger, f'System loaded: m={system.m}, n={system.n}, interval=[{system.grid.a}, {system.grid.c}], '
                      f'constant C: {system.is_constant}')

    #===================================#
    #===============Solve===============#
    #===================================#

    N, capped = coupled_grid_size(system.grid, args.eps, grid_max=args.grid_max)
    if capped:
        write_log(logger, f'Grid cap {args.grid_max} binds at eps={args.eps}; the solve may be under-resolved')
    system = system.with_grid(system.grid.refine(N))
    write_log(logger, f'Solving regularized problem at eps={args.eps} on N={N} nodes...')
    sol = solve_regularized(system, rhs, args.eps)
    defect = residual_integral_form(system, sol.x, rhs.on(system.grid))
    kernel_defect = float(np.abs(system.F.T @ sol.d).max())
    write_log(logger, f'||x||_2 = {l2_norm(sol.x):.6e} | residual = {sol.residual:.2e} | '
                      f'condition ~ {sol.condition:.2e} | spend_time:{(time() - start_time) / 60:.2f}min')

    #===================================#
    #==============Saving===============#
    #===================================#

    save_path = os.path.join(args.out, 'solve')
    fname = save_solution_csv(sol, save_path)
    write_log(logger, f'Solution saved --> {fname}')
    payload = {
        'command': 'solve',
        'eps': sol.eps,
        'grid_n': sol.grid_n,
        'grid_capped': capped,
        'residual': sol.residual,
        'condition': sol.condition,
        'd': sol.d,
        'kernel_defect': kernel_defect,
        'x_norm': l2_norm(sol.x),
        'z_norm': l2_norm(sol.z),
        'equation_defect': defect,
    }
    fname = write_summary(args, save_path, payload)
    write_log(logger, f'Summary saved --> {fname}')
    result_writing(args, verdict='solved', metric=sol.residual, metric_name='residual')

    return 0
