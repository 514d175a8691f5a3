import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import tra_solver
from tra_solver.config.run_config import RunConfig, load_run_config
from tra_solver.errors import ConfigError, ParameterDomainError, TraSolverError
from tra_solver.potentials import (
    PotentialName,
    PotentialSpec,
    dimensionless_strengths,
    potential_grid,
    potential_grid_frame,
    three_parameter_landmarks
)
from tra_solver.solver import (
    REFERENCE_SPECTRUM,
    ProblemKind,
    SolverMode,
    compare_with_reference,
    default_wavefunction_grid,
    reconstruct_wavefunction,
    reference_comparison_frame,
    solve_levels,
    solve_spectrum,
    wavefunction_frame
)
from tra_solver.utils.csv import write_frame_csv
from tra_solver.utils.json import (
    get_json_compatible_value,
    get_recursively_filtered_dict_without_null_values,
    write_json
)
from tra_solver.utils.logging import ThreadedLogging, configure_logging
from tra_solver.verify import ALL_SUITES, SUITES, run_verification


LOGGER = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_SOLVER_ERROR = 2
EXIT_VERIFY_FAILED = 3

TABLE_DIGITS = 13

REFERENCE_STRENGTHS = (-6.0, 10.0, 2.5)

REFERENCE_BASIS_SIZE = 20


def _metadata(run_config: Optional[RunConfig]) -> dict:
    return {
        'version': tra_solver.__version__,
        'config': get_recursively_filtered_dict_without_null_values(
            get_json_compatible_value(run_config.to_dict())
        ) if run_config is not None else None
    }


def _csv_metadata(run_config: RunConfig) -> dict:
    metadata = _metadata(run_config)
    return {
        'version': metadata['version'],
        'config': json.dumps(metadata['config'], sort_keys=True)
    }


def _output_path(run_config: RunConfig, suffix: str) -> Path:
    return Path(run_config.output.directory) / f'{run_config.output.name}-{suffix}'


def format_level_table(values: Sequence[float], header: str) -> str:
    lines = [f'{"n":>3}  {header}']
    lines.extend(f'{n:>3d}  {value:.{TABLE_DIGITS}g}' for n, value in enumerate(values))
    return '\n'.join(lines)


def _is_reference_problem(run_config: RunConfig) -> bool:
    if run_config.potential is None or run_config.potential.name != PotentialName.THREE_PARAMETER:
        return False
    spec = run_config.to_potential_spec()
    return (
        spec.get('lambda') == 1.0
        and all(
            math.isclose(value, expected, abs_tol=1e-12)
            for value, expected in zip(dimensionless_strengths(spec), REFERENCE_STRENGTHS)
        )
        and run_config.solver.basis_size == REFERENCE_BASIS_SIZE
    )


def cmd_spectrum(run_config: RunConfig) -> int:
    cfg = run_config.to_solve_config()
    with ThreadedLogging():
        result = solve_spectrum(cfg)
    data = {**_metadata(run_config), 'result': result.to_dict()}
    if cfg.problem == ProblemKind.OSCILLATOR:
        values, header = result.energies, 'E_n'
    else:
        values, header = result.eigenvalues, 'epsilon_n'
    if run_config.solver.levels is not None:
        values = values[:run_config.solver.levels]
    print(format_level_table(values, header))
    if _is_reference_problem(run_config):
        frame = reference_comparison_frame(compare_with_reference(result.eigenvalues))
        data['reference_comparison'] = frame.to_dict(orient='records')
        write_frame_csv(frame, _output_path(run_config, 'reference.csv'), _csv_metadata(run_config))
        print()
        print(_format_reference_block(frame))
    write_json(_output_path(run_config, 'spectrum.json'), data)
    return EXIT_OK


def _format_reference_block(frame: pd.DataFrame) -> str:
    lines = [f'reference comparison ({len(REFERENCE_SPECTRUM)} values)']
    for hypothesis, rows in frame.groupby('hypothesis', sort=False):
        lines.append(
            f'{hypothesis}: {int(rows["agrees"].sum())} agree,'
            f' median relative difference {float(rows["relative_difference"].median()):.3g}'
        )
    return '\n'.join(lines)


def _wavefunction_grid(run_config: RunConfig, default: np.ndarray) -> np.ndarray:
    grid = run_config.grid
    x_min = grid.x_min if grid.x_min is not None else float(default[0])
    x_max = grid.x_max if grid.x_max is not None else float(default[-1])
    if not x_min < x_max:
        raise ConfigError('x_min must be below x_max', key_path='grid')
    return np.linspace(x_min, x_max, grid.n_points)


def cmd_wavefunction(run_config: RunConfig) -> int:
    cfg = run_config.to_solve_config(sweep_sizes=())
    state = run_config.solver.state
    levels = solve_levels(cfg)
    bound_energies = [
        energy for energy, bound in zip(levels.energies, levels.bound_flags) if bound
    ]
    if not 0 <= state < len(bound_energies):
        raise ConfigError(
            f'state {state} requested but only {len(bound_energies)} bound states found',
            key_path='solver.state'
        )
    grid = _wavefunction_grid(run_config, default_wavefunction_grid(cfg))
    sample = reconstruct_wavefunction(cfg, bound_energies[state], grid)
    write_frame_csv(
        wavefunction_frame(sample),
        _output_path(run_config, f'wavefunction-{state}.csv'),
        _csv_metadata(run_config)
    )
    write_json(_output_path(run_config, f'wavefunction-{state}.json'), {
        **_metadata(run_config),
        'state': state,
        'energy': sample.energy,
        'norm': sample.norm,
        'coefficients': sample.coefficients
    })
    LOGGER.info('State %d at E=%.13g written', state, sample.energy)
    return EXIT_OK


def _length_scale(spec: PotentialSpec) -> float:
    for key in ('lambda', 'alpha', 'omega'):
        if key in spec.parameters:
            return spec.get(key)
    return 1.0


def _default_potential_range(spec: PotentialSpec) -> Tuple[float, float]:
    low, high = spec.domain
    scale = _length_scale(spec)
    x_min = low + 1e-3 / scale if math.isfinite(low) else -10 / scale
    x_max = high - 1e-3 / scale if math.isfinite(high) else 10 / scale
    return x_min, x_max


def _potential_curve(
    spec: PotentialSpec, run_config: RunConfig, angular_momentum: int
) -> pd.DataFrame:
    default_min, default_max = _default_potential_range(spec)
    grid = run_config.grid
    try:
        return potential_grid_frame(potential_grid(
            spec,
            grid.x_min if grid.x_min is not None else default_min,
            grid.x_max if grid.x_max is not None else default_max,
            grid.n_points,
            angular_momentum
        ))
    except ParameterDomainError as exc:
        raise ConfigError(str(exc), key_path='grid') from exc


def cmd_potential(run_config: RunConfig) -> int:
    angular_momentum = run_config.oscillator.angular_momentum if run_config.oscillator else 0
    sweep = run_config.potential.sweep if run_config.potential else None
    if sweep is None or run_config.potential is None:
        frame = _potential_curve(run_config.to_potential_spec(), run_config, angular_momentum)
    else:
        columns: List[pd.DataFrame] = []
        for value in sweep.values:
            spec = run_config.potential.with_parameter(sweep.parameter, value).to_potential_spec()
            curve = _potential_curve(spec, run_config, angular_momentum)
            if not columns:
                columns.append(curve[['x']])
            columns.append(curve[['V']].rename(columns={'V': f'{sweep.parameter}={value:g}'}))
        frame = pd.concat(columns, axis=1)
    spec = run_config.to_potential_spec()
    if spec.name == PotentialName.THREE_PARAMETER and spec.get('VR') == 0:
        try:
            LOGGER.info('Potential landmarks: %r', three_parameter_landmarks(spec))
        except ParameterDomainError as exc:
            LOGGER.info('No landmarks: %s', exc)
    write_frame_csv(frame, _output_path(run_config, 'potential.csv'), _csv_metadata(run_config))
    return EXIT_OK


def cmd_verify(run_config: Optional[RunConfig], suite: str, output_directory: str) -> int:
    problems = [run_config.to_solve_config(sweep_sizes=())] if run_config else None
    with ThreadedLogging():
        report = run_verification(suite, problems)
    data = {**_metadata(run_config), **report.to_dict()}
    write_json(Path(output_directory) / f'verify-{suite}.json', data)
    print(json.dumps(get_json_compatible_value(report.to_dict()), indent=2, sort_keys=True))
    if not report.passed:
        LOGGER.error(
            'Verification failed: %s',
            ', '.join(check.name for check in report.checks if not check.passed)
        )
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def get_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='tra_solver',
        description='Tridiagonal representation solver for the Schrodinger equation'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    for command in ('spectrum', 'wavefunction', 'potential', 'verify'):
        subparser = subparsers.add_parser(command)
        subparser.add_argument(
            '--config', required=command != 'verify', help='Path to the YAML run config'
        )
        subparser.add_argument('--out', help='Output directory (overrides output.directory)')
        if command in ('spectrum', 'wavefunction'):
            subparser.add_argument(
                '--mode', choices=[mode.value for mode in SolverMode], help='Solver mode'
            )
            subparser.add_argument('--basis-size', type=int, help='Basis size N')
        if command == 'wavefunction':
            subparser.add_argument('--state', type=int, help='Bound state index m')
        if command == 'verify':
            subparser.add_argument(
                '--suite', default=ALL_SUITES, help=f'One of {[ALL_SUITES, *SUITES]}'
            )
    return parser


def run(args: argparse.Namespace) -> int:
    run_config = load_run_config(args.config) if args.config else None
    if run_config is not None:
        run_config = run_config.with_overrides(
            mode=getattr(args, 'mode', None),
            basis_size=getattr(args, 'basis_size', None),
            state=getattr(args, 'state', None),
            output_directory=args.out
        )
    if args.command == 'verify':
        output_directory = args.out or (
            run_config.output.directory if run_config else RunConfig().output.directory
        )
        return cmd_verify(run_config, args.suite, output_directory)
    assert run_config is not None
    if args.command == 'spectrum':
        return cmd_spectrum(run_config)
    if args.command == 'wavefunction':
        return cmd_wavefunction(run_config)
    return cmd_potential(run_config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = get_argument_parser().parse_args(argv)
    configure_logging()
    try:
        return run(args)
    except ConfigError as exc:
        LOGGER.error('Configuration error: %s', exc)
        return EXIT_CONFIG_ERROR
    except TraSolverError as exc:
        LOGGER.error('Solver failure: %r', exc)
        return EXIT_SOLVER_ERROR


if __name__ == '__main__':
    sys.exit(main())
