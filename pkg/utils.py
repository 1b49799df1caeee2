# Import modules
import os
import sys
import tqdm
import random
import logging
import argparse
import numpy as np

def str2bool(v):
    if isinstance(v, bool):
        return v
    if v.lower() in ('yes', 'true', 't', 'y', '1'):
        return True
    elif v.lower() in ('no', 'false', 'f', 'n', '0'):
        return False
    else:
        raise argparse.ArgumentTypeError('Boolean value expected.')

def path_check(args):
    # Results Path Checking
    if not os.path.exists(args.out):
        os.makedirs(args.out)

    command_dir = args.command if args.command != 'demo' else f'demo_{args.scenario}'
    if not os.path.exists(os.path.join(args.out, command_dir)):
        os.makedirs(os.path.join(args.out, command_dir))

def check_args(args):
    """
    Validate the numeric ranges and file references of a run configuration.
    """
    if args.eps <= 0:
        raise InvalidInputError(f'--eps must be positive, got {args.eps}')
    if args.eps0 <= 0:
        raise InvalidInputError(f'--eps0 must be positive, got {args.eps0}')
    if not 0 < args.ratio < 1:
        raise InvalidInputError(f'--ratio must lie in (0, 1), got {args.ratio}')
    if args.steps < 3:
        raise InvalidInputError(f'--steps must be at least 3, got {args.steps}')
    if args.grid < 3:
        raise InvalidInputError(f'--grid must be at least 3, got {args.grid}')
    if args.grid_max < args.grid:
        raise InvalidInputError(f'--grid_max ({args.grid_max}) is below --grid ({args.grid})')
    if args.num_workers < 1:
        raise InvalidInputError(f'--num_workers must be at least 1, got {args.num_workers}')

    if args.command == 'demo':
        if args.scenario not in ('example1', 'example2', 'cantor'):
            raise InvalidInputError("Choose demo scenario in ['example1', 'example2', 'cantor']")
        return

    if args.system is None or not os.path.isfile(args.system):
        raise InvalidInputError(f'System file not found: {args.system}')
    if args.command in ('solve', 'probe'):
        if args.rhs is None or not os.path.isfile(args.rhs):
            raise InvalidInputError(f'Right-hand side file not found: {args.rhs}')

class InvalidInputError(ValueError):
    pass

class MembershipError(InvalidInputError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or dict()

class SolveError(RuntimeError):
    def __init__(self, message, residual=float('nan'), condition=float('nan'), eps=None, grid_n=None):
        super().__init__(message)
        self.residual = residual
        self.condition = condition
        self.eps = eps
        self.grid_n = grid_n

class StepSizeError(SolveError):
    def __init__(self, message, node=None, value=None, eps=None, grid_n=None):
        super().__init__(message, eps=eps, grid_n=grid_n)
        self.node = node
        self.value = value

class LogSpaceOverflowError(SolveError):
    pass

def float_array(value, name: str) -> np.ndarray:
    """
    np.array(value, dtype=float) with ragged or non-numeric input reported as InvalidInputError.
    """
    try:
        return np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f'{name} is not a numeric array ({e})') from None

class TqdmLoggingHandler(logging.Handler):
    def __init__(self, level=logging.DEBUG):
        super().__init__(level)
        self.stream = sys.stdout

    def flush(self):
        self.acquire()
        try:
            if self.stream and hasattr(self.stream, "flush"):
                self.stream.flush()
        finally:
            self.release()

    def emit(self, record):
        try:
            msg = self.format(record)
            tqdm.tqdm.write(msg, self.stream)
            self.flush()
        except (KeyboardInterrupt, SystemExit, RecursionError):
            raise
        except Exception:
            self.handleError(record)

def get_task_logger(name: str):
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    if not any(isinstance(h, TqdmLoggingHandler) for h in logger.handlers):
        handler = TqdmLoggingHandler()
        handler.setFormatter(logging.Formatter(" %(asctime)s - %(message)s", "%Y-%m-%d %H:%M:%S"))
        logger.addHandler(handler)
    logger.propagate = False
    return logger

def write_log(logger, message):
    if logger:
        logger.info(message)

def set_random_seed(seed: int):
    np.random.seed(seed)
    random.seed(seed)
