import json
from pathlib import Path
from typing import Iterator
from unittest.mock import MagicMock, patch

import pytest

from tra_solver.cli.main import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_SOLVER_ERROR,
    format_level_table,
    main
)
from tra_solver.errors import ConvergenceError
from tra_solver.utils.csv import read_frame_csv


OSCILLATOR_CONFIG = """
oscillator:
  omega: 1.0
solver:
  basis_size: 30
  sweep_sizes: [10, 20]
  levels: 5
output:
  name: oscillator
"""

REFERENCE_CONFIG = """
potential:
  name: ThreeParameter
  parameters: {lambda: 1.0, u0: -6.0, u1: 10.0, ur: 2.5}
solver:
  mode: paper-literal
  basis_size: 20
  sweep_sizes: [10, 20]
output:
  name: table
"""

FAMILY_CONFIG = """
potential:
  name: ThreeParameter
  parameters: {lambda: 1.0, u0: -2.0, u1: -5.0, ur: 1.0}
  sweep: {parameter: ur, values: [1, 3, 5]}
grid: {x_min: 0.05, x_max: 6.0, n_points: 50}
output:
  name: family
"""


@pytest.fixture(autouse=True)
def _configure_logging_mock() -> Iterator[MagicMock]:
    with patch('tra_solver.cli.main.configure_logging') as mock:
        yield mock


@pytest.fixture(name='write_config')
def _write_config(tmp_path: Path):
    def _write(text: str) -> str:
        path = tmp_path / 'run.yaml'
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write


@pytest.fixture(name='out_dir')
def _out_dir(tmp_path: Path) -> Path:
    return tmp_path / 'out'


class TestFormatLevelTable:
    def test_should_print_thirteen_significant_digits(self):
        table = format_level_table([1 / 3, 1.5], 'epsilon_n')
        assert table.split('\n') == ['  n  epsilon_n', '  0  0.3333333333333', '  1  1.5']


class TestSpectrumCommand:
    def test_should_print_oscillator_levels(
        self, write_config, out_dir: Path, capsys: pytest.CaptureFixture
    ):
        config_path = write_config(OSCILLATOR_CONFIG)
        assert main(['spectrum', '--config', config_path, '--out', str(out_dir)]) == EXIT_OK
        lines = capsys.readouterr().out.strip().split('\n')
        assert lines[1:] == ['  0  1.5', '  1  3.5', '  2  5.5', '  3  7.5', '  4  9.5']
        data = json.loads((out_dir / 'oscillator-spectrum.json').read_text(encoding='utf-8'))
        assert data['result']['mode'] == 'oscillator'
        assert sorted(data['result']['sweep']) == ['10', '20']
        assert data['config']['oscillator']['omega'] == 1.0
        assert 'version' in data

    def test_should_write_identical_files_for_identical_config(
        self, write_config, out_dir: Path
    ):
        config_path = write_config(OSCILLATOR_CONFIG)
        output_file = out_dir / 'oscillator-spectrum.json'
        main(['spectrum', '--config', config_path, '--out', str(out_dir)])
        first = output_file.read_bytes()
        main(['spectrum', '--config', config_path, '--out', str(out_dir)])
        assert output_file.read_bytes() == first

    def test_should_append_reference_comparison(
        self, write_config, out_dir: Path, capsys: pytest.CaptureFixture
    ):
        config_path = write_config(REFERENCE_CONFIG)
        assert main(['spectrum', '--config', config_path, '--out', str(out_dir)]) == EXIT_OK
        output = capsys.readouterr().out
        assert 'reference comparison (20 values)' in output
        assert len(output.split('\n\n')[0].split('\n')) == 21
        frame = read_frame_csv(out_dir / 'table-reference.csv')
        assert set(frame['hypothesis']) == {'epsilon', '-epsilon', '|epsilon|'}

    def test_should_exit_with_config_error_for_malformed_config(
        self, write_config, out_dir: Path
    ):
        config_path = write_config('oscillator: {omega: 1.0, spin: 2}\n')
        assert main(
            ['spectrum', '--config', config_path, '--out', str(out_dir)]
        ) == EXIT_CONFIG_ERROR
        assert not out_dir.exists()

    def test_should_exit_with_solver_error(self, write_config, out_dir: Path):
        config_path = write_config(OSCILLATOR_CONFIG)
        with patch(
            'tra_solver.cli.main.solve_spectrum', side_effect=ConvergenceError('stalled')
        ):
            assert main(
                ['spectrum', '--config', config_path, '--out', str(out_dir)]
            ) == EXIT_SOLVER_ERROR


class TestWavefunctionCommand:
    def test_should_write_wavefunction_csv(self, write_config, out_dir: Path):
        config_path = write_config(OSCILLATOR_CONFIG)
        assert main([
            'wavefunction', '--config', config_path, '--out', str(out_dir), '--state', '1'
        ]) == EXIT_OK
        frame = read_frame_csv(out_dir / 'oscillator-wavefunction-1.csv')
        assert list(frame.columns) == ['x', 'psi']
        assert len(frame) == 600
        data = json.loads(
            (out_dir / 'oscillator-wavefunction-1.json').read_text(encoding='utf-8')
        )
        assert data['energy'] == pytest.approx(3.5)
        assert len(data['coefficients']) == 30

    def test_should_reject_invalid_state(self, write_config, out_dir: Path):
        config_path = write_config(OSCILLATOR_CONFIG)
        assert main([
            'wavefunction', '--config', config_path, '--out', str(out_dir), '--state', '99'
        ]) == EXIT_CONFIG_ERROR


class TestPotentialCommand:
    def test_should_write_one_column_per_swept_value(self, write_config, out_dir: Path):
        config_path = write_config(FAMILY_CONFIG)
        assert main(['potential', '--config', config_path, '--out', str(out_dir)]) == EXIT_OK
        frame = read_frame_csv(out_dir / 'family-potential.csv')
        assert list(frame.columns) == ['x', 'ur=1', 'ur=3', 'ur=5']
        assert len(frame) == 50

    def test_should_reject_grid_outside_domain(self, write_config, out_dir: Path):
        config_path = write_config(FAMILY_CONFIG.replace('x_min: 0.05', 'x_min: -1.0'))
        assert main(
            ['potential', '--config', config_path, '--out', str(out_dir)]
        ) == EXIT_CONFIG_ERROR


class TestVerifyCommand:
    def test_should_pass_tridiagonality_suite(
        self, write_config, out_dir: Path, capsys: pytest.CaptureFixture
    ):
        config_path = write_config(OSCILLATOR_CONFIG)
        assert main([
            'verify', '--suite', 'tridiagonality', '--config', config_path, '--out', str(out_dir)
        ]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report['suite'] == 'tridiagonality'
        assert report['passed']
        assert (out_dir / 'verify-tridiagonality.json').exists()

    def test_should_reject_unknown_suite(self, out_dir: Path):
        assert main(['verify', '--suite', 'unknown', '--out', str(out_dir)]) == EXIT_CONFIG_ERROR
