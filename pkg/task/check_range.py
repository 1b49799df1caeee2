# Import modules
import os
import pandas as pd
# Import custom modules
from utils import get_task_logger, write_log
from linalg.reduction import reduce_pencil, pencil_regular
from solver.closed_range import closed_range_for_system
from task.utils import load_system, write_summary, result_writing

def check_range(args):

    #===================================#
    #==============Logging==============#
    #===================================#

    logger = get_task_logger(__name__)
    write_log(logger, 'Start closed-range check!')

    #===================================#
    #=============Data Load=============#
    #===================================#

    system = load_system(args.system, args.grid)
    write_log(logger, f'System loaded: m={system.m}, n={system.n}, constant C: {system.is_constant}')

    #===================================#
    #=============Criterion=============#
    #===================================#

    verdict = closed_range_for_system(system)
    F1, C0, L, R, r = reduce_pencil(system.F, system.C_values[0])
    regular = pencil_regular(F1, C0) if system.m == system.n else None
    write_log(logger, f'r = {r} | numeric bounded: {verdict.bounded} | algebraic bounded: {verdict.algebraic_bounded}')
    write_log(logger, f'sup estimate: {verdict.sup_estimate:.6e} | growth exponent: {verdict.growth_exponent:.3f}')

    #===================================#
    #==============Saving===============#
    #===================================#

    save_path = os.path.join(args.out, 'check-range')
    samples = pd.DataFrame(verdict.eps_samples, columns=['eps', 'q_c2_mod_norm'])
    samples.to_csv(os.path.join(save_path, 'eps_samples.csv'), index=False, float_format='%.17g')

    payload = {
        'command': 'check-range',
        'range_closed': verdict.bounded and verdict.algebraic_bounded,
        'pencil_regular': regular,
        'L': L,
        'R': R,
        'C0': C0,
    }
    payload.update(verdict.summary())
    write_summary(args, save_path, payload)
    result_writing(args, verdict='bounded' if verdict.bounded else 'unbounded',
                   metric=verdict.growth_exponent, metric_name='growth_exponent')

    return 0
