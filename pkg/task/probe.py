# Import modules
import os
import pandas as pd
from time import time
# Import custom modules
from utils import get_task_logger, write_log
from solver.regularized import pseudosolution_probe
from task.utils import load_system, load_rhs, save_probe_hdf5, write_summary, result_writing

def probe(args):

    #===================================#
    #==============Logging==============#
    #===================================#

    logger = get_task_logger(__name__)
    write_log(logger, 'Start probing!')

    #===================================#
    #=============Data Load=============#
    #===================================#

    write_log(logger, 'Load system...')
    start_time = time()
    system = load_system(args.system, args.grid)
    rhs = load_rhs(args.rhs, system.grid)
    write_log(logger, f'System loaded: m={system.m}, n={system.n}, interval=[{system.grid.a}, {system.grid.c}]')

    #===================================#
    #===============Probe===============#
    #===================================#

    write_log(logger, f'eps schedule: {args.eps0} * {args.ratio}^k, k < {args.steps}')
    report = pseudosolution_probe(system, rhs, eps0=args.eps0, ratio=args.ratio, steps=args.steps,
                                  grid_max=args.grid_max, num_workers=args.num_workers, logger=logger)
    write_log(logger, f'Verdict: {report.verdict} | spend_time:{(time() - start_time) / 60:.2f}min')

    #===================================#
    #==============Saving===============#
    #===================================#

    save_path = os.path.join(args.out, 'probe')
    trace = pd.DataFrame({
        'eps': report.eps_schedule,
        'grid_n': report.grid_sizes,
        'norm': report.norms,
        'residual': report.residuals,
        'capped': report.capped,
    })
    fname = os.path.join(save_path, 'norms.csv')
    trace.to_csv(fname, index=False, float_format='%.17g')
    write_log(logger, f'Norm trace saved --> {fname}')

    if report.estimate is not None:
        fname = os.path.join(save_path, 'estimate.csv')
        report.estimate.to_csv(fname, prefix='x')
        write_log(logger, f'Pseudosolution estimate saved --> {fname}')

    if args.save_hdf5:
        fname = save_probe_hdf5(report, save_path)
        write_log(logger, f'Per-step solutions saved --> {fname}')

    payload = {'command': 'probe'}
    payload.update(report.summary())
    payload['conditions'] = [sol.condition if sol is not None else float('nan') for sol in report.solutions]
    write_summary(args, save_path, payload)
    result_writing(args, verdict=report.verdict, metric=report.norms[-1], metric_name='final_norm')

    return 4 if report.verdict == 'inconclusive' else 0
