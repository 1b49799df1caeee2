# Import modules
import sys
import time
import logging
import argparse
# Import custom modules
from task.solve import solve
from task.probe import probe
from task.check_range import check_range
from task.demo import demo
# Utils
from utils import str2bool, path_check, check_args, set_random_seed, InvalidInputError, SolveError

TASKS = {
    'solve': solve,
    'probe': probe,
    'check-range': check_range,
    'demo': demo,
}

def main(args):

    # Time setting
    total_start_time = time.time()

    try:
        # Argument checking
        check_args(args)

        # Seed setting
        set_random_seed(args.seed)

        # Path setting
        path_check(args)

        exit_code = TASKS[args.command](args)
    except InvalidInputError as e:
        logging.getLogger(__name__).error(f'Invalid input: {e}')
        exit_code = 2
    except SolveError as e:
        logging.getLogger(__name__).error(f'Solver failure (residual={e.residual:.3e}, eps={e.eps}, N={e.grid_n}): {e}')
        exit_code = 3

    # Time calculate
    print(f'Done! ; {round((time.time()-total_start_time)/60, 3)}min spend')

    return exit_code

def build_parser():
    parser = argparse.ArgumentParser(description='Descriptor system pseudosolution toolkit')
    # Task setting
    parser.add_argument('command', type=str, choices=list(TASKS),
                        help="Choose task in 'solve', 'probe', 'check-range', 'demo'")
    parser.add_argument('scenario', nargs='?', default=None, type=str,
                        help="Demo scenario in 'example1', 'example2', 'cantor'; only used by demo")
    # Path setting
    parser.add_argument('--system', default=None, type=str,
                        help='System description JSON path')
    parser.add_argument('--rhs', default=None, type=str,
                        help='Right-hand side JSON path')
    parser.add_argument('--out', default='./results', type=str,
                        help='Results file path; Default is ./results')
    # Regularization setting
    parser.add_argument('--eps', default=0.1, type=float,
                        help='Regularization parameter of a single solve; Default is 0.1')
    parser.add_argument('--eps0', default=0.5, type=float,
                        help='First eps of the probe schedule; Default is 0.5')
    parser.add_argument('--ratio', default=0.5, type=float,
                        help='Geometric ratio of the probe schedule; Default is 0.5')
    parser.add_argument('--steps', default=8, type=int,
                        help='Number of probe steps; Default is 8')
    # Grid setting
    parser.add_argument('--grid', default=2001, type=int,
                        help='Number of grid nodes; Default is 2001')
    parser.add_argument('--grid_max', default=200000, type=int,
                        help='Cap on the eps-coupled grid size; Default is 200000')
    # Seed & Run setting
    parser.add_argument('--seed', default=42, type=int,
                        help='Random seed; Default is 42')
    parser.add_argument('--num_workers', default=1, type=int,
                        help='Concurrent probe steps; Default is 1')
    parser.add_argument('--save_hdf5', default=True, type=str2bool,
                        help='Dump per-step probe solutions to hdf5; Default is True')
    return parser

if __name__=='__main__':
    args = build_parser().parse_args()

    sys.exit(main(args))
