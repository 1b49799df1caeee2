import os
import json
import h5py
import numpy as np
import pandas as pd
# Import custom modules
from utils import InvalidInputError
from function_space.grid import Grid, GridFn
from descriptor.system import ConstantSource, PolySource, SampledSource, DescriptorSystem, RhsPair, RhsSource
from linalg.matrix import RANK_RTOL, PINV_TOL
from linalg.reduction import REDUCE_TOL, PENCIL_TOL
from descriptor.operator import BC_TOL, DERIVATIVE_BOUND, GROWTH_THRESHOLD
from solver.regularized import SOLVE_TOL, DELTA_REL, GAMMA
from solver.closed_range import M_CAP, FLAT_RTOL
from solver.riccati import RICCATI_EPS_MAX
from solver.utils import GRID_PER_EPS

def _read_json(path: str) -> dict:
    try:
        with open(path, 'r') as f:
            dat = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f'{path}: not valid JSON ({e})')
    if not isinstance(dat, dict):
        raise InvalidInputError(f'{path}: expected a JSON object at the top level')
    return dat

def _require(dat: dict, key: str, path: str):
    if key not in dat:
        raise InvalidInputError(f'{path}: missing field "{key}"')
    return dat[key]

def _sample_count(spec: dict):
    if isinstance(spec, dict) and spec.get('kind') == 'samples':
        samples = spec.get('samples', [])
        if not isinstance(samples, list):
            raise InvalidInputError('"samples" must be a list of values, one per node')
        return len(samples)
    return None

def load_source(spec: dict, grid: Grid, path: str):
    """
    Source from {"kind": "constant", "value": ...}, {"kind": "poly", "coeffs": [...]}
    or {"kind": "samples", "samples": [...]}; samples are taken on grid.
    """
    if not isinstance(spec, dict):
        raise InvalidInputError(f'{path}: a source must be an object with a "kind" field')
    kind = _require(spec, 'kind', path)
    try:
        if kind == 'constant':
            return ConstantSource(_require(spec, 'value', path))
        if kind == 'poly':
            return PolySource(_require(spec, 'coeffs', path))
        if kind == 'samples':
            return SampledSource(grid, _require(spec, 'samples', path))
    except (TypeError, ValueError) as e:
        if isinstance(e, InvalidInputError):
            raise
        raise InvalidInputError(f'{path}: malformed "{kind}" source ({e})')
    raise InvalidInputError(f'{path}: unknown source kind "{kind}"; choose constant, poly or samples')

def load_system(path: str, grid_n: int) -> DescriptorSystem:
    """
    {"F": [[...]], "C": {"kind": ...}, "interval": [a, c]}.
    A sampled C fixes the node count; otherwise grid_n is used.
    """
    dat = _read_json(path)
    interval = _require(dat, 'interval', path)
    if not isinstance(interval, list) or len(interval) != 2:
        raise InvalidInputError(f'{path}: "interval" must be [a, c]')
    C_spec = _require(dat, 'C', path)
    N = _sample_count(C_spec) or grid_n
    grid = Grid(interval[0], interval[1], N)
    C = load_source(C_spec, grid, path)
    return DescriptorSystem(_require(dat, 'F', path), C, grid)

def load_rhs(path: str, grid: Grid):
    """
    {"f": {"kind": ...}, "f0": [...]}. Analytic f gives an RhsSource that can
    be evaluated on refined grids; sampled f gives an RhsPair on its own grid.
    """
    dat = _read_json(path)
    f_spec = _require(dat, 'f', path)
    f0 = _require(dat, 'f0', path)
    count = _sample_count(f_spec)
    if count is None:
        return RhsSource(load_source(f_spec, grid, path), f0)
    own_grid = grid.refine(count) if count != grid.N else grid
    f = load_source(f_spec, own_grid, path)
    return RhsPair(GridFn(own_grid, f.evaluate(own_grid.nodes)), f0)

def tolerance_table() -> dict:
    return {
        'rank_rtol': RANK_RTOL,
        'pinv_tol': PINV_TOL,
        'reduce_tol': REDUCE_TOL,
        'pencil_tol': PENCIL_TOL,
        'bc_tol': BC_TOL,
        'derivative_bound': DERIVATIVE_BOUND,
        'growth_threshold': GROWTH_THRESHOLD,
        'solve_tol': SOLVE_TOL,
        'delta_rel': DELTA_REL,
        'gamma': GAMMA,
        'm_cap': M_CAP,
        'flat_rtol': FLAT_RTOL,
        'riccati_eps_max': RICCATI_EPS_MAX,
        'grid_per_eps': GRID_PER_EPS,
    }

def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value

def write_summary(args, save_path: str, payload: dict, fname: str = 'summary.json') -> str:
    """
    JSON summary with the full configuration and tolerance table embedded.
    Keys are sorted and no timestamps are written, so reruns are byte-identical.
    """
    summary = dict(payload)
    summary['config'] = vars(args)
    summary['tolerances'] = tolerance_table()
    fname = os.path.join(save_path, fname)
    with open(fname, 'w') as f:
        json.dump(_jsonable(summary), f, indent=2, sort_keys=True)
    return fname

def save_solution_csv(sol, save_path: str, fname: str = 'solution.csv') -> str:
    """
    Per-node columns t, x1..xn, z1..zm of a RegSolution.
    """
    dat = sol.x.to_frame('x').join(sol.z.to_frame('z').drop(columns='t'))
    fname = os.path.join(save_path, fname)
    dat.to_csv(fname, index=False, float_format='%.17g')
    return fname

def save_probe_hdf5(report, save_path: str, fname: str = 'probe.hdf5') -> str:
    fname = os.path.join(save_path, fname)
    with h5py.File(fname, 'w') as f:
        f.create_dataset('eps_schedule', data=np.array(report.eps_schedule))
        f.create_dataset('norms', data=np.array(report.norms))
        f.create_dataset('grid_sizes', data=np.array(report.grid_sizes))
        f.attrs['verdict'] = report.verdict
        for k, sol in enumerate(report.solutions):
            if sol is None:
                continue
            step = f.create_group(f'step_{k:02d}')
            step.attrs['eps'] = sol.eps
            step.attrs['residual'] = sol.residual
            step.create_dataset('t', data=sol.x.nodes)
            step.create_dataset('x', data=sol.x.values)
            step.create_dataset('z', data=sol.z.values)
            step.create_dataset('d', data=sol.d)
    return fname

def result_writing(args, verdict: str, metric: float, metric_name: str):
    fname = os.path.join(args.out, 'results.csv')

    result = pd.DataFrame([{
        'seed': args.seed,
        'command': args.command,
        'scenario': args.scenario if args.command == 'demo' else '',
        'eps': args.eps,
        'grid': args.grid,
        'verdict': verdict,
        'metric_name': metric_name,
        'metric': metric
    }])

    # CSV file Making
    if not os.path.isfile(fname):
        result.to_csv(fname, index=False)
        return

    result_dat = pd.read_csv(fname, dtype={'scenario': str}).fillna({'scenario': ''})
    result_dat = pd.concat([result_dat, result], ignore_index=True)
    result_dat.to_csv(fname, index=False)
