"""
Integration tests for the command-line surface and exit codes
"""
import csv
import json
import os

import numpy as np
import pytest

import main
from errors import QuadratureError

pytestmark = pytest.mark.integration


def _read_rows(path):
    with open(path, encoding='utf-8') as handle:
        return list(csv.reader(handle))


def test_specs_lists_shipped_files(capsys):
    assert main.main(['specs']) == 0
    listing = capsys.readouterr().out
    for spec_id in ('cauchy', 'stable_a1_d1', 'counterexample', 'relativistic_m1_d3'):
        assert spec_id in listing


def test_density_origin_row(output_dir, capsys):
    """The Cauchy density at r = 0 is 1/π"""
    assert main.main(['density', '--spec', 'cauchy', '--t', '1', '--d', '1', '--out', output_dir]) == 0
    csv_path = os.path.join(output_dir, 'density_cauchy_t1_d1.csv')
    rows = _read_rows(csv_path)
    assert rows[0] == ['r', 'value']
    assert float(rows[1][0]) == 0.0
    assert float(rows[1][1]) == pytest.approx(1.0 / np.pi, abs=1e-6)
    with open(os.path.join(output_dir, 'manifest.json'), encoding='utf-8') as handle:
        manifest = json.load(handle)
    assert manifest['outputs'] == ['density_cauchy_t1_d1.csv', 'density_cauchy_t1_d1.json']
    assert manifest['status'] == 'ok'


def test_density_reruns_are_byte_identical(tmp_path):
    first, second = str(tmp_path / 'a'), str(tmp_path / 'b')
    args = ['density', '--spec', 'stable_a15_d1', '--t', '0.5']
    assert main.main(args + ['--out', first]) == 0
    assert main.main(args + ['--out', second]) == 0
    name = 'density_stable_a15_d1_t0.5_d1.csv'
    with open(os.path.join(first, name), 'rb') as a, open(os.path.join(second, name), 'rb') as b:
        assert a.read() == b.read()


def test_invalid_alpha_is_a_usage_error(tmp_path, capsys):
    """α outside (0, 2) is rejected at parse time with the file position"""
    spec_file = tmp_path / 'bad.toml'
    spec_file.write_text('id = "bad"\nkind = "stable"\ndimension = 1\n\n[parameters]\nalpha = 2.5\n')
    assert main.main(['density', '--spec', str(spec_file), '--out', str(tmp_path / 'out')]) == 2
    assert 'bad.toml:6' in capsys.readouterr().err


def test_unknown_suite_exit_code():
    assert main.main(['check', 'nonsense']) == 2


def test_missing_command_exit_code():
    assert main.main([]) == 2


def test_zero_paths_exit_code(output_dir):
    assert main.main(['simulate', '--spec', 'cauchy', '--n', '0', '--out', output_dir]) == 2


def test_start_outside_ball_exit_code(output_dir):
    code = main.main(['simulate', '--spec', 'cauchy', '--radius', '1', '--x0', '1.5', '--out', output_dir])
    assert code == 3


def test_simulate_is_reproducible(tmp_path):
    """Same seed, same summary and same exit samples"""
    summaries = []
    for name in ('a', 'b'):
        out = str(tmp_path / name)
        args = ['simulate', '--spec', 'stable_a1_d1', '--n', '2000', '--seed', '11', '--samples-csv', '--out', out]
        assert main.main(args) == 0
        with open(os.path.join(out, 'simulate_stable_a1_d1.json'), encoding='utf-8') as handle:
            summaries.append(json.load(handle))
        with open(os.path.join(out, 'exit_stable_a1_d1.csv'), 'rb') as handle:
            summaries.append(handle.read())
    assert summaries[0] == summaries[2]
    assert summaries[1] == summaries[3]
    assert summaries[0]['closed_form_tau'] == pytest.approx(1.0)


def test_check_symbols_passes(output_dir):
    assert main.main(['check', 'symbols', '--spec', 'stable_a15_d1', '--out', output_dir]) == 0
    with open(os.path.join(output_dir, 'check_symbols.json'), encoding='utf-8') as handle:
        tree = json.load(handle)
    assert tree['status'] == 'pass'
    assert tree['first_failure'] is None


def test_numeric_budget_exit_code(mocker, output_dir, capsys):
    """Quadrature failures surface as exit 4 with the error named"""
    mocker.patch('modules.commands.cmd_check',
                 side_effect=QuadratureError("no convergence", partial_sums=[1.0, 1.1]))
    assert main.main(['check', 'kernels', '--out', output_dir]) == 4
    assert 'QuadratureError' in capsys.readouterr().err


def test_check_failure_exit_code(mocker, output_dir):
    mocker.patch('modules.commands.cmd_check', return_value=1)
    assert main.main(['check', 'levy', '--out', output_dir]) == 1


@pytest.mark.slow
def test_check_bounds_stable(output_dir):
    assert main.main(['check', 'bounds', '--spec', 'stable_a1_d1', '--out', output_dir]) == 0


@pytest.mark.slow
def test_check_counterexample_default(output_dir):
    assert main.main(['check', 'counterexample', '--out', output_dir]) == 0
    rows = _read_rows(os.path.join(output_dir, 'counterexample_scaling.csv'))
    assert rows[0] == ['series', 'abscissa', 'difference']
    assert len(rows) > 1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
