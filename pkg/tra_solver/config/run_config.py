import logging
from typing import Any, Collection, Mapping, NamedTuple, Optional, Sequence, Tuple

import yaml

from tra_solver.errors import ConfigError, TraSolverError
from tra_solver.potentials import PotentialName, PotentialSpec
from tra_solver.solver import (
    DEFAULT_BASIS_SIZE,
    DEFAULT_FIXED_MU,
    DEFAULT_SWEEP_SIZES,
    SolveConfig,
    SolverMode
)


LOGGER = logging.getLogger(__name__)


ENERGY_KEYS = ('V0', 'V1', 'VR')

DIMENSIONLESS_KEYS = ('u0', 'u1', 'ur')


def _check_keys(
    config_dict: Any,
    key_path: str,
    allowed: Collection[str],
    required: Collection[str] = ()
) -> Mapping[str, Any]:
    if not isinstance(config_dict, dict):
        raise ConfigError('expected a mapping', key_path=key_path)
    for key in config_dict:
        if key not in allowed:
            raise ConfigError('unknown key', key_path=f'{key_path}.{key}')
    for key in required:
        if key not in config_dict:
            raise ConfigError('missing required key', key_path=f'{key_path}.{key}')
    return config_dict


def _number(value: Any, key_path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f'expected a number, got {value!r}', key_path=key_path)
    return float(value)


def _integer(value: Any, key_path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f'expected an integer, got {value!r}', key_path=key_path)
    return value


class PotentialSweepConfig(NamedTuple):
    parameter: str
    values: Tuple[float, ...]

    @staticmethod
    def from_dict(sweep_dict: Any, key_path: str) -> 'PotentialSweepConfig':
        sweep_dict = _check_keys(
            sweep_dict, key_path, ('parameter', 'values'), ('parameter', 'values')
        )
        if not isinstance(sweep_dict['values'], list) or not sweep_dict['values']:
            raise ConfigError('expected a non-empty list', key_path=f'{key_path}.values')
        return PotentialSweepConfig(
            parameter=str(sweep_dict['parameter']),
            values=tuple(
                _number(value, f'{key_path}.values') for value in sweep_dict['values']
            )
        )


class PotentialConfig(NamedTuple):
    name: PotentialName
    parameters: Mapping[str, float]
    sweep: Optional[PotentialSweepConfig] = None

    @staticmethod
    def from_dict(potential_dict: Any, key_path: str = 'potential') -> 'PotentialConfig':
        potential_dict = _check_keys(
            potential_dict, key_path, ('name', 'parameters', 'sweep'), ('name', 'parameters')
        )
        try:
            name = PotentialName(potential_dict['name'])
        except ValueError as exc:
            raise ConfigError(
                f'unknown potential {potential_dict["name"]!r}', key_path=f'{key_path}.name'
            ) from exc
        parameters_dict = potential_dict['parameters']
        if not isinstance(parameters_dict, dict):
            raise ConfigError('expected a mapping', key_path=f'{key_path}.parameters')
        parameters = {
            str(key): _number(value, f'{key_path}.parameters.{key}')
            for key, value in parameters_dict.items()
        }
        sweep = (
            PotentialSweepConfig.from_dict(potential_dict['sweep'], f'{key_path}.sweep')
            if potential_dict.get('sweep') is not None
            else None
        )
        config = PotentialConfig(name=name, parameters=parameters, sweep=sweep)
        config.to_potential_spec()
        if sweep is not None:
            config.with_parameter(sweep.parameter, sweep.values[0]).to_potential_spec()
        return config

    def with_parameter(self, key: str, value: float) -> 'PotentialConfig':
        if key not in self.parameters:
            raise ConfigError(f'cannot sweep unset parameter {key!r}', key_path='potential.sweep')
        return self._replace(parameters={**self.parameters, key: value})

    def to_potential_spec(self) -> PotentialSpec:
        key_path = 'potential.parameters'
        try:
            if self.name != PotentialName.THREE_PARAMETER:
                return PotentialSpec(self.name, dict(self.parameters))
            has_energies = any(key in self.parameters for key in ENERGY_KEYS)
            has_strengths = any(key in self.parameters for key in DIMENSIONLESS_KEYS)
            if has_energies == has_strengths:
                raise ConfigError(
                    'give either V0, V1, VR or u0, u1, ur (not both)', key_path=key_path
                )
            keys = ENERGY_KEYS if has_energies else DIMENSIONLESS_KEYS
            _check_keys(dict(self.parameters), key_path, (*keys, 'lambda'), (*keys, 'lambda'))
            values = [self.parameters[key] for key in keys]
            if has_energies:
                return PotentialSpec.three_parameter(*values, scale=self.parameters['lambda'])
            return PotentialSpec.three_parameter_dimensionless(
                *values, scale=self.parameters['lambda']
            )
        except TraSolverError as exc:
            raise ConfigError(str(exc), key_path=key_path) from exc


class OscillatorConfig(NamedTuple):
    omega: float
    angular_momentum: int = 0
    basis_scale: Optional[float] = None

    @staticmethod
    def from_dict(oscillator_dict: Any, key_path: str = 'oscillator') -> 'OscillatorConfig':
        oscillator_dict = _check_keys(
            oscillator_dict, key_path, ('omega', 'angular_momentum', 'basis_scale'), ('omega',)
        )
        basis_scale = oscillator_dict.get('basis_scale')
        return OscillatorConfig(
            omega=_number(oscillator_dict['omega'], f'{key_path}.omega'),
            angular_momentum=_integer(
                oscillator_dict.get('angular_momentum', 0), f'{key_path}.angular_momentum'
            ),
            basis_scale=(
                _number(basis_scale, f'{key_path}.basis_scale')
                if basis_scale is not None else None
            )
        )


class SolverConfig(NamedTuple):
    mode: SolverMode = SolverMode.FIXED_BASIS
    basis_size: int = DEFAULT_BASIS_SIZE
    mu: float = DEFAULT_FIXED_MU
    sweep_sizes: Tuple[int, ...] = DEFAULT_SWEEP_SIZES
    levels: Optional[int] = None
    state: int = 0

    @staticmethod
    def from_dict(solver_dict: Any, key_path: str = 'solver') -> 'SolverConfig':
        solver_dict = _check_keys(
            solver_dict, key_path, ('mode', 'basis_size', 'mu', 'sweep_sizes', 'levels', 'state')
        )
        defaults = SolverConfig()
        try:
            mode = SolverMode(solver_dict.get('mode', defaults.mode.value))
        except ValueError as exc:
            raise ConfigError(
                f'unknown mode {solver_dict["mode"]!r}', key_path=f'{key_path}.mode'
            ) from exc
        sweep_sizes = solver_dict.get('sweep_sizes', list(defaults.sweep_sizes))
        if not isinstance(sweep_sizes, list):
            raise ConfigError('expected a list', key_path=f'{key_path}.sweep_sizes')
        levels = solver_dict.get('levels')
        return SolverConfig(
            mode=mode,
            basis_size=_integer(
                solver_dict.get('basis_size', defaults.basis_size), f'{key_path}.basis_size'
            ),
            mu=_number(solver_dict.get('mu', defaults.mu), f'{key_path}.mu'),
            sweep_sizes=tuple(
                _integer(size, f'{key_path}.sweep_sizes') for size in sweep_sizes
            ),
            levels=_integer(levels, f'{key_path}.levels') if levels is not None else None,
            state=_integer(solver_dict.get('state', defaults.state), f'{key_path}.state')
        )


class GridConfig(NamedTuple):
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    n_points: int = 600

    @staticmethod
    def from_dict(grid_dict: Any, key_path: str = 'grid') -> 'GridConfig':
        grid_dict = _check_keys(grid_dict, key_path, ('x_min', 'x_max', 'n_points'))
        config = GridConfig(
            x_min=(
                _number(grid_dict['x_min'], f'{key_path}.x_min')
                if grid_dict.get('x_min') is not None else None
            ),
            x_max=(
                _number(grid_dict['x_max'], f'{key_path}.x_max')
                if grid_dict.get('x_max') is not None else None
            ),
            n_points=_integer(grid_dict.get('n_points', 600), f'{key_path}.n_points')
        )
        if config.n_points < 2:
            raise ConfigError('at least 2 points required', key_path=f'{key_path}.n_points')
        if config.x_min is not None and config.x_max is not None and config.x_min >= config.x_max:
            raise ConfigError('x_min must be below x_max', key_path=key_path)
        return config


class OutputConfig(NamedTuple):
    directory: str = 'output'
    name: str = 'run'

    @staticmethod
    def from_dict(output_dict: Any, key_path: str = 'output') -> 'OutputConfig':
        output_dict = _check_keys(output_dict, key_path, ('directory', 'name'))
        defaults = OutputConfig()
        return OutputConfig(
            directory=str(output_dict.get('directory', defaults.directory)),
            name=str(output_dict.get('name', defaults.name))
        )


class RunConfig(NamedTuple):
    potential: Optional[PotentialConfig] = None
    oscillator: Optional[OscillatorConfig] = None
    solver: SolverConfig = SolverConfig()
    grid: GridConfig = GridConfig()
    output: OutputConfig = OutputConfig()

    @staticmethod
    def from_dict(config_dict: Any) -> 'RunConfig':
        config_dict = _check_keys(
            config_dict, 'config', ('potential', 'oscillator', 'solver', 'grid', 'output')
        )
        if ('potential' in config_dict) == ('oscillator' in config_dict):
            raise ConfigError('give exactly one of potential or oscillator', key_path='config')
        return RunConfig(
            potential=(
                PotentialConfig.from_dict(config_dict['potential'])
                if 'potential' in config_dict else None
            ),
            oscillator=(
                OscillatorConfig.from_dict(config_dict['oscillator'])
                if 'oscillator' in config_dict else None
            ),
            solver=SolverConfig.from_dict(config_dict.get('solver') or {}),
            grid=GridConfig.from_dict(config_dict.get('grid') or {}),
            output=OutputConfig.from_dict(config_dict.get('output') or {})
        )

    def with_overrides(
        self,
        mode: Optional[str] = None,
        basis_size: Optional[int] = None,
        state: Optional[int] = None,
        output_directory: Optional[str] = None
    ) -> 'RunConfig':
        solver = self.solver
        if mode is not None:
            solver = solver._replace(mode=SolverMode(mode))
        if basis_size is not None:
            solver = solver._replace(basis_size=basis_size)
        if state is not None:
            solver = solver._replace(state=state)
        output = self.output
        if output_directory is not None:
            output = output._replace(directory=output_directory)
        return self._replace(solver=solver, output=output)

    def to_potential_spec(self) -> PotentialSpec:
        if self.oscillator is not None:
            return PotentialSpec.oscillator(self.oscillator.omega)
        assert self.potential is not None
        return self.potential.to_potential_spec()

    def to_solve_config(self, sweep_sizes: Optional[Sequence[int]] = None) -> SolveConfig:
        try:
            return SolveConfig(
                potential=self.to_potential_spec(),
                angular_momentum=self.oscillator.angular_momentum if self.oscillator else 0,
                basis_size=self.solver.basis_size,
                mode=self.solver.mode,
                mu=self.solver.mu,
                basis_scale=self.oscillator.basis_scale if self.oscillator else None,
                sweep_sizes=tuple(
                    self.solver.sweep_sizes if sweep_sizes is None else sweep_sizes
                )
            )
        except TraSolverError as exc:
            raise ConfigError(str(exc), key_path='config') from exc

    def to_dict(self) -> dict:
        return {
            'potential': (
                {
                    'name': self.potential.name.value,
                    'parameters': dict(self.potential.parameters),
                    'sweep': self.potential.sweep._asdict() if self.potential.sweep else None
                }
                if self.potential else None
            ),
            'oscillator': self.oscillator._asdict() if self.oscillator else None,
            'solver': {**self.solver._asdict(), 'mode': self.solver.mode.value},
            'grid': self.grid._asdict(),
            'output': self.output._asdict()
        }


def load_run_config(config_file: str) -> RunConfig:
    try:
        with open(config_file, 'r', encoding='utf-8') as config_fp:
            config_dict = yaml.load(config_fp, yaml.SafeLoader)
    except OSError as exc:
        raise ConfigError(f'cannot read config: {exc}', key_path=config_file) from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f'malformed YAML: {exc}', key_path=config_file) from exc
    run_config = RunConfig.from_dict(config_dict)
    LOGGER.debug('Loaded run config from %r: %r', config_file, run_config)
    return run_config
