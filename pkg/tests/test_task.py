import os
import json
import h5py
import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal
# Import custom modules
from main import main, build_parser
from utils import InvalidInputError
from function_space.grid import Grid
from descriptor.system import RhsPair, RhsSource
from task.utils import load_system, load_rhs, tolerance_table, result_writing

EXAMPLE1_JSON = {
    'F': [[1.0, 0.0], [0.0, 0.0]],
    'C': {'kind': 'constant', 'value': [[1.0, -1.0], [1.0, 0.0]]},
    'interval': [0.0, 1.0],
}
ZERO_RHS_JSON = {'f': {'kind': 'constant', 'value': [0.0, 0.0]}, 'f0': [0.0, 0.0]}
POLY_RHS_JSON = {'f': {'kind': 'poly', 'coeffs': [[0.0, -1.0], [0.0, -1.0]]}, 'f0': [1.0, 0.0]}

def _dump(path, dat) -> str:
    with open(path, 'w') as f:
        json.dump(dat, f)
    return str(path)

def _run(tmp_path, *argv) -> int:
    args = build_parser().parse_args([*argv, '--out', str(tmp_path / 'results')])
    return main(args)

def _summary(tmp_path, subdir) -> dict:
    with open(tmp_path / 'results' / subdir / 'summary.json') as f:
        return json.load(f)

@pytest.fixture
def example1_files(tmp_path):
    system = _dump(tmp_path / 'system.json', EXAMPLE1_JSON)
    rhs = _dump(tmp_path / 'rhs.json', ZERO_RHS_JSON)
    return system, rhs

class TestLoaders:
    def test_constant_system(self, example1_files):
        system = load_system(example1_files[0], 101)
        assert (system.m, system.n, system.grid.N) == (2, 2, 101)
        assert system.is_constant

    def test_sampled_C_fixes_grid(self, tmp_path):
        samples = [[[1.0, float(k)], [0.0, 1.0]] for k in range(11)]
        path = _dump(tmp_path / 'system.json', {'F': [[1.0, 0.0], [0.0, 0.0]], 'interval': [0.0, 2.0],
                                                'C': {'kind': 'samples', 'samples': samples}})
        system = load_system(path, 2001)
        assert system.grid == Grid(0.0, 2.0, 11)
        assert not system.is_constant
        assert system.C_values[4, 0, 1] == 4.0

    def test_analytic_rhs_is_a_source(self, tmp_path):
        rhs = load_rhs(_dump(tmp_path / 'rhs.json', POLY_RHS_JSON), Grid(0.0, 1.0, 11))
        assert isinstance(rhs, RhsSource)
        pair = rhs.on(Grid(0.0, 1.0, 3))
        assert_array_equal(pair.f.values[:, 1], [-1.0, -1.5, -2.0])

    def test_sampled_rhs_keeps_its_grid(self, tmp_path):
        path = _dump(tmp_path / 'rhs.json', {'f': {'kind': 'samples', 'samples': [[0.0, 1.0]] * 5}, 'f0': [0.0, 0.0]})
        rhs = load_rhs(path, Grid(0.0, 1.0, 101))
        assert isinstance(rhs, RhsPair)
        assert rhs.grid == Grid(0.0, 1.0, 5)

    @pytest.mark.parametrize('dat', [
        {'F': [[1.0]], 'C': {'kind': 'constant', 'value': [[0.0]]}},
        {'F': [[1.0]], 'C': {'kind': 'spline', 'value': [[0.0]]}, 'interval': [0.0, 1.0]},
        {'F': [[1.0]], 'C': {'kind': 'constant', 'value': [[0.0]]}, 'interval': [0.0]},
        {'F': [[1.0]], 'C': [[0.0]], 'interval': [0.0, 1.0]},
        {'F': [[1.0]], 'C': {'kind': 'constant', 'value': [[0.0, 1.0]]}, 'interval': [0.0, 1.0]},
        {'F': [[1.0, 0.0], [0.0]], 'C': {'kind': 'constant', 'value': [[0.0, 0.0], [0.0, 0.0]]}, 'interval': [0.0, 1.0]},
        {'F': [[1.0]], 'C': {'kind': 'constant', 'value': [[0.0]]}, 'interval': ['a', 1.0]},
        {'F': [[1.0]], 'C': {'kind': 'constant', 'value': [[0.0]]}, 'interval': 1.0},
        {'F': [[1.0]], 'C': {'kind': 'samples', 'samples': 3.0}, 'interval': [0.0, 1.0]},
    ])
    def test_malformed_system(self, tmp_path, dat):
        with pytest.raises(InvalidInputError):
            load_system(_dump(tmp_path / 'system.json', dat), 11)

    @pytest.mark.parametrize('dat', [
        {'f': {'kind': 'constant', 'value': [0.0, 0.0]}, 'f0': 'x'},
        {'f': {'kind': 'constant', 'value': [0.0, 0.0]}, 'f0': [0.0, None]},
        {'f': {'kind': 'poly', 'coeffs': [[0.0, 1.0], [0.0]]}, 'f0': [0.0, 0.0]},
        [0.0, 0.0],
    ])
    def test_malformed_rhs(self, tmp_path, dat):
        with pytest.raises(InvalidInputError):
            load_rhs(_dump(tmp_path / 'rhs.json', dat), Grid(0.0, 1.0, 11))

    def test_not_json(self, tmp_path):
        path = tmp_path / 'system.json'
        path.write_text('{"F": ')
        with pytest.raises(InvalidInputError):
            load_system(str(path), 11)

    def test_tolerance_table_is_complete(self):
        table = tolerance_table()
        assert table['solve_tol'] == 1e-8
        assert table['delta_rel'] == 0.05 and table['gamma'] == 1.5
        assert all(isinstance(v, (int, float)) for v in table.values())

class TestMain:
    def test_solve_zero_data(self, tmp_path, example1_files):
        system, rhs = example1_files
        assert _run(tmp_path, 'solve', '--system', system, '--rhs', rhs, '--grid', '201') == 0
        summary = _summary(tmp_path, 'solve')
        assert summary['residual'] == 0.0 and summary['x_norm'] == 0.0
        assert summary['grid_n'] == 201 and not summary['grid_capped']
        assert summary['config']['eps'] == 0.1
        assert summary['tolerances']['solve_tol'] == 1e-8
        solution = pd.read_csv(tmp_path / 'results' / 'solve' / 'solution.csv')
        assert list(solution.columns) == ['t', 'x1', 'x2', 'z1', 'z2']
        assert (solution[['x1', 'x2', 'z1', 'z2']] == 0.0).all().all()

    def test_solve_couples_grid_to_eps(self, tmp_path, example1_files):
        system, rhs = example1_files
        assert _run(tmp_path, 'solve', '--system', system, '--rhs', rhs, '--grid', '101', '--eps', '0.0625') == 0
        assert _summary(tmp_path, 'solve')['grid_n'] == 320

    def test_probe_writes_trace(self, tmp_path, example1_files):
        system, _ = example1_files
        rhs = _dump(tmp_path / 'rhs_poly.json', POLY_RHS_JSON)
        code = _run(tmp_path, 'probe', '--system', system, '--rhs', rhs, '--grid', '201', '--steps', '3')
        summary = _summary(tmp_path, 'probe')
        assert code == (4 if summary['verdict'] == 'inconclusive' else 0)
        trace = pd.read_csv(tmp_path / 'results' / 'probe' / 'norms.csv')
        assert list(trace['eps']) == [0.5, 0.25, 0.125]
        with h5py.File(tmp_path / 'results' / 'probe' / 'probe.hdf5', 'r') as f:
            assert f.attrs['verdict'] == summary['verdict']
            assert f['norms'].shape == (3,)
            assert f['step_02/x'].shape == (201, 2)

    def test_probe_without_hdf5(self, tmp_path, example1_files):
        system, rhs = example1_files
        code = _run(tmp_path, 'probe', '--system', system, '--rhs', rhs, '--grid', '101', '--steps', '3',
                    '--save_hdf5', 'false')
        assert code == 0
        assert not os.path.exists(tmp_path / 'results' / 'probe' / 'probe.hdf5')
        assert os.path.isfile(tmp_path / 'results' / 'probe' / 'estimate.csv')

    def test_check_range_example1(self, tmp_path, example1_files):
        assert _run(tmp_path, 'check-range', '--system', example1_files[0]) == 0
        summary = _summary(tmp_path, 'check-range')
        assert summary['range_closed'] is False
        assert summary['pencil_regular'] is True
        assert summary['sup_estimate'] == 'inf'
        assert summary['growth_exponent'] == pytest.approx(2.0, abs=0.1)
        samples = pd.read_csv(tmp_path / 'results' / 'check-range' / 'eps_samples.csv')
        assert list(samples.columns) == ['eps', 'q_c2_mod_norm']

    def test_demo_example1(self, tmp_path):
        assert _run(tmp_path, 'demo', 'example1') == 0
        summary = _summary(tmp_path, 'demo_example1')
        assert summary['x1_error_decreasing'] and summary['x2_norm_decreasing']
        assert summary['verdict'] == 'converging'
        assert all(row['within_bounds'] and row['nondecreasing'] for row in summary['riccati'])
        assert summary['closed_range']['bounded'] is False
        table = pd.read_csv(tmp_path / 'results' / 'demo_example1' / 'convergence.csv')
        assert list(table['eps']) == [0.3, 0.1, 0.03]
        assert (table['x1_closed_form_gap'] <= 1e-2).all()

    def test_demo_example2(self, tmp_path):
        assert _run(tmp_path, 'demo', 'example2') == 0
        summary = _summary(tmp_path, 'demo_example2')
        assert summary['printed_pair_verified'] and summary['computed_pair_verified']
        assert summary['pencil_regular'] is False
        assert summary['range_closed'] is True
        assert summary['C0'] == [[0.0, 0.0], [1.0, 0.0]]
        assert summary['C0_printed_gap'] == 2.0
        assert summary['adjoint_second_component'] <= 1e-12
        assert summary['verdict'] == 'closed'

    def test_demo_cantor(self, tmp_path):
        assert _run(tmp_path, 'demo', 'cantor', '--grid', '401') == 0
        summary = _summary(tmp_path, 'demo_cantor')
        assert summary['l2_distance_decreasing'] and summary['F_derivative_zero']
        table = pd.read_csv(tmp_path / 'results' / 'demo_cantor' / 'bernstein.csv')
        assert list(table['n']) == [10, 50, 200]

    def test_summary_is_byte_identical_on_rerun(self, tmp_path):
        fname = tmp_path / 'results' / 'demo_example2' / 'summary.json'
        _run(tmp_path, 'demo', 'example2')
        first = fname.read_bytes()
        _run(tmp_path, 'demo', 'example2')
        assert fname.read_bytes() == first

    def test_results_are_appended(self, tmp_path):
        _run(tmp_path, 'demo', 'example2')
        _run(tmp_path, 'demo', 'cantor', '--grid', '401')
        results = pd.read_csv(tmp_path / 'results' / 'results.csv')
        assert list(results['scenario']) == ['example2', 'cantor']
        assert list(results['verdict']) == ['closed', 'converging']

    @pytest.mark.filterwarnings('error::FutureWarning')
    def test_result_rows_start_a_new_file(self, tmp_path):
        args = build_parser().parse_args(['solve', '--out', str(tmp_path)])
        result_writing(args, 'solved', 0.0, 'residual')
        demo_args = build_parser().parse_args(['demo', 'cantor', '--out', str(tmp_path)])
        result_writing(demo_args, 'converging', 0.5, 'l2_distance')
        results = pd.read_csv(tmp_path / 'results.csv')
        assert list(results['command']) == ['solve', 'demo']
        assert list(results['scenario'].fillna('')) == ['', 'cantor']

    @pytest.mark.parametrize('argv', [
        ('demo',),
        ('demo', 'example3'),
        ('solve',),
        ('demo', 'cantor', '--eps', '-1'),
        ('demo', 'cantor', '--ratio', '1.5'),
        ('demo', 'cantor', '--steps', '2'),
        ('demo', 'cantor', '--grid', '3000', '--grid_max', '2000'),
        ('demo', 'cantor', '--num_workers', '0'),
    ])
    def test_invalid_input_exit_code(self, tmp_path, argv):
        assert _run(tmp_path, *argv) == 2

    def test_missing_rhs_exit_code(self, tmp_path, example1_files):
        assert _run(tmp_path, 'solve', '--system', example1_files[0]) == 2

    def test_malformed_file_exit_code(self, tmp_path, example1_files):
        bad = tmp_path / 'bad.json'
        bad.write_text('[')
        assert _run(tmp_path, 'solve', '--system', str(bad), '--rhs', example1_files[1]) == 2

    @pytest.mark.parametrize('system_dat, rhs_dat', [
        ({**EXAMPLE1_JSON, 'F': [[1.0, 0.0], [0.0]]}, ZERO_RHS_JSON),
        ({**EXAMPLE1_JSON, 'interval': ['a', 1.0]}, ZERO_RHS_JSON),
        (EXAMPLE1_JSON, {**ZERO_RHS_JSON, 'f0': 'x'}),
    ])
    def test_malformed_content_exit_code(self, tmp_path, system_dat, rhs_dat):
        system = _dump(tmp_path / 'system.json', system_dat)
        rhs = _dump(tmp_path / 'rhs.json', rhs_dat)
        assert _run(tmp_path, 'solve', '--system', system, '--rhs', rhs, '--grid', '101') == 2

    def test_solver_failure_exit_code(self, tmp_path, example1_files, monkeypatch):
        monkeypatch.setattr('solver.regularized._backward_error', lambda A, u, b: 1.0)
        system, rhs = example1_files
        assert _run(tmp_path, 'solve', '--system', system, '--rhs', rhs, '--grid', '101') == 3
