from pathlib import Path

import pytest

from tra_solver.config.run_config import (
    PotentialConfig,
    RunConfig,
    SolverConfig,
    load_run_config
)
from tra_solver.errors import ConfigError
from tra_solver.potentials import PotentialName
from tra_solver.solver import SolverMode


THREE_PARAMETER_DICT = {
    'potential': {
        'name': 'ThreeParameter',
        'parameters': {'lambda': 1.0, 'u0': -6.0, 'u1': 10.0, 'ur': 2.5}
    }
}


class TestRunConfigFromDict:
    def test_should_apply_defaults(self):
        run_config = RunConfig.from_dict(THREE_PARAMETER_DICT)
        assert run_config.solver == SolverConfig()
        assert run_config.oscillator is None
        assert run_config.output.directory == 'output'

    def test_should_convert_dimensionless_strengths(self):
        spec = RunConfig.from_dict(THREE_PARAMETER_DICT).to_potential_spec()
        assert spec.get('V0') == pytest.approx(-3.0)
        assert spec.get('VR') == pytest.approx(1.25)

    def test_should_accept_energies(self):
        run_config = RunConfig.from_dict({'potential': {
            'name': 'ThreeParameter',
            'parameters': {'lambda': 2.0, 'V0': -12.0, 'V1': 20.0, 'VR': 5.0}
        }})
        assert run_config.to_potential_spec().get('V1') == 20.0

    def test_should_reject_mixed_strengths(self):
        with pytest.raises(ConfigError) as exc_info:
            RunConfig.from_dict({'potential': {
                'name': 'ThreeParameter',
                'parameters': {'lambda': 1.0, 'V0': -1.0, 'u1': 1.0, 'ur': 1.0}
            }})
        assert exc_info.value.key_path == 'potential.parameters'

    def test_should_reject_unknown_nested_key(self):
        with pytest.raises(ConfigError) as exc_info:
            RunConfig.from_dict({**THREE_PARAMETER_DICT, 'solver': {'basis': 20}})
        assert exc_info.value.key_path == 'solver.basis'

    def test_should_reject_missing_key(self):
        with pytest.raises(ConfigError) as exc_info:
            RunConfig.from_dict({'oscillator': {'angular_momentum': 1}})
        assert exc_info.value.key_path == 'oscillator.omega'

    def test_should_require_exactly_one_problem(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({'solver': {'basis_size': 10}})

    def test_should_reject_unknown_mode(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**THREE_PARAMETER_DICT, 'solver': {'mode': 'guess'}})

    def test_should_reject_invalid_parameter_value(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({'potential': {
                'name': 'Morse', 'parameters': {'V0': 0, 'V1': 1, 'V2': 1, 'alpha': -1}
            }})

    def test_should_read_potential_sweep(self):
        run_config = RunConfig.from_dict({'potential': {
            **THREE_PARAMETER_DICT['potential'],
            'sweep': {'parameter': 'ur', 'values': [1, 3]}
        }})
        assert run_config.potential is not None
        assert run_config.potential.sweep is not None
        assert run_config.potential.sweep.values == (1.0, 3.0)

    def test_should_reject_sweep_of_unset_parameter(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({'potential': {
                **THREE_PARAMETER_DICT['potential'],
                'sweep': {'parameter': 'V0', 'values': [1]}
            }})


class TestRunConfigOverrides:
    def test_should_prefer_cli_values(self):
        run_config = RunConfig.from_dict(THREE_PARAMETER_DICT).with_overrides(
            mode='self-consistent', basis_size=12, state=2, output_directory='elsewhere'
        )
        assert run_config.solver.mode == SolverMode.SELF_CONSISTENT
        assert run_config.solver.basis_size == 12
        assert run_config.solver.state == 2
        assert run_config.output.directory == 'elsewhere'

    def test_should_keep_config_values_without_overrides(self):
        run_config = RunConfig.from_dict({
            **THREE_PARAMETER_DICT, 'solver': {'basis_size': 30}
        }).with_overrides()
        assert run_config.solver.basis_size == 30


class TestToSolveConfig:
    def test_should_carry_oscillator_settings(self):
        cfg = RunConfig.from_dict({
            'oscillator': {'omega': 1.5, 'angular_momentum': 2, 'basis_scale': 3.0}
        }).to_solve_config(sweep_sizes=())
        assert cfg.angular_momentum == 2
        assert cfg.basis_scale == 3.0
        assert cfg.sweep_sizes == ()

    def test_should_reject_potential_without_pipeline(self):
        run_config = RunConfig.from_dict(
            {'potential': {'name': 'Coulomb', 'parameters': {'Z': 1.0}}}
        )
        with pytest.raises(ConfigError):
            run_config.to_solve_config()


class TestPotentialConfig:
    def test_should_replace_parameter(self):
        config = PotentialConfig.from_dict(THREE_PARAMETER_DICT['potential'])
        assert config.with_parameter('ur', 7.0).parameters['ur'] == 7.0
        assert config.name == PotentialName.THREE_PARAMETER


class TestLoadRunConfig:
    def test_should_load_yaml_file(self, tmp_path: Path):
        config_file = tmp_path / 'run.yaml'
        config_file.write_text('oscillator:\n  omega: 1.0\nsolver:\n  levels: 5\n')
        run_config = load_run_config(str(config_file))
        assert run_config.oscillator is not None
        assert run_config.oscillator.omega == 1.0
        assert run_config.solver.levels == 5

    def test_should_raise_config_error_for_malformed_yaml(self, tmp_path: Path):
        config_file = tmp_path / 'run.yaml'
        config_file.write_text('oscillator: [\n')
        with pytest.raises(ConfigError):
            load_run_config(str(config_file))

    def test_should_raise_config_error_for_missing_file(self, tmp_path: Path):
        with pytest.raises(ConfigError):
            load_run_config(str(tmp_path / 'missing.yaml'))

    @pytest.mark.parametrize('name', [
        'three_parameter_table', 'oscillator', 'potential_family_a', 'potential_family_b'
    ])
    def test_should_load_shipped_examples(self, name: str):
        config_file = Path(__file__).parents[3] / 'config' / 'examples' / f'{name}.yaml'
        assert load_run_config(str(config_file)).output.name == name
