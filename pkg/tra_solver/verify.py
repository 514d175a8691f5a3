import concurrent.futures
import dataclasses
import logging
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from tra_solver.basis import BasisSpec, CoordinateMap, MapName, overlap_matrix
from tra_solver.eigensolve import eig_tridiag
from tra_solver.errors import ConfigError, TraSolverError
from tra_solver.fdoracle import FDGrid, fd_bound_state_count, fd_spectrum
from tra_solver.operator import (
    assemble_fixed_basis,
    assemble_oscillator,
    assemble_tridiagonal,
    centrifugal_nu,
    default_quadrature_size,
    oscillator_basis,
    oscillator_energy_scale_candidates,
    quadrature_assemble,
    three_parameter_basis,
    tridiagonality_defect
)
from tra_solver.potentials import PotentialSpec, dimensionless_strengths
from tra_solver.solver import (
    ProblemKind,
    SolveConfig,
    SolverMode,
    oscillator_spectrum_analytic,
    solve_levels
)


LOGGER = logging.getLogger(__name__)


ALL_SUITES = 'all'

CHECK_SIZE = 15

ORTHONORMALITY_TOLERANCE = 1e-10

OVERLAP_PREDICTION_TOLERANCE = 1e-9

TRIDIAGONALITY_TOLERANCE = 1e-8

NEGATIVE_CONTROL_DEFECT = 1e-4

CONSISTENCY_TOLERANCE = 1e-10

CONSISTENCY_SAMPLES = 20

ANALYTIC_TOLERANCE = 1e-8

FD_ANALYTIC_TOLERANCE = 1e-5

FD_RELATIVE_TOLERANCE = 1e-4

ORACLE_BASIS_SIZE = 30

RECONCILIATION_SCALE_FACTORS = (0.8, 1.3)

DEFAULT_THREE_PARAMETER_SETS = ((-6.0, 10.0, 2.5), (-2.0, -5.0, 1.0), (-2.0, -3.0, 5.0))

DEFAULT_ANGULAR_MOMENTA = (0, 1, 2)

ORACLE_MODES = (SolverMode.SELF_CONSISTENT, SolverMode.FIXED_BASIS, SolverMode.PAPER_LITERAL)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail}


class SuiteReport(NamedTuple):
    suite: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            'suite': self.suite,
            'checks': [check.to_dict() for check in self.checks],
            'passed': self.passed
        }


def default_problems() -> List[SolveConfig]:
    return [
        *[
            SolveConfig(
                potential=PotentialSpec.oscillator(1.0),
                angular_momentum=angular_momentum,
                sweep_sizes=()
            )
            for angular_momentum in DEFAULT_ANGULAR_MOMENTA
        ],
        *[
            SolveConfig(
                potential=PotentialSpec.three_parameter_dimensionless(u0, u1, ur, 1.0),
                sweep_sizes=()
            )
            for u0, u1, ur in DEFAULT_THREE_PARAMETER_SETS
        ]
    ]


def _label(cfg: SolveConfig) -> str:
    parameters = ','.join(
        f'{key}={value:g}' for key, value in sorted(cfg.potential.parameters.items())
    )
    if cfg.angular_momentum:
        parameters += f',l={cfg.angular_momentum}'
    return f'{cfg.potential.name.value}({parameters})'


def _relative_max(difference: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.max(np.abs(reference))) if reference.size else 0.0
    return float(np.max(np.abs(difference))) / max(scale, np.finfo(float).tiny)


def _energy_basis_mu(cfg: SolveConfig) -> float:
    return cfg.mu if cfg.mu > 0 else 2.0


# orthonormality

def _orthonormality_checks(cfg: SolveConfig) -> List[CheckResult]:
    if cfg.problem == ProblemKind.OSCILLATOR:
        spec = oscillator_basis(cfg.oscillator_scale, cfg.angular_momentum)
        actual = overlap_matrix(spec, CHECK_SIZE, default_quadrature_size(CHECK_SIZE))
        error = float(np.max(np.abs(actual - np.eye(CHECK_SIZE))))
        return [CheckResult(
            f'orthonormal oscillator basis {_label(cfg)}',
            error < ORTHONORMALITY_TOLERANCE,
            f'max |overlap - I| = {error:.3g}'
        )]
    u0, u1, ur = dimensionless_strengths(cfg.potential)
    scale = cfg.potential.get('lambda')
    mu = _energy_basis_mu(cfg)
    spec = three_parameter_basis(mu, centrifugal_nu(ur), scale)
    actual = overlap_matrix(spec, CHECK_SIZE, CHECK_SIZE)
    expected = assemble_fixed_basis(u0, u1, ur, scale, mu, CHECK_SIZE).w
    error = _relative_max(actual - expected, expected)
    return [CheckResult(
        f'overlap equals (I + Y)(I - Y)^-1 for {_label(cfg)}',
        error < OVERLAP_PREDICTION_TOLERANCE,
        f'relative deviation {error:.3g} at mu={mu:g}'
    )]


# tridiagonality

def _tridiagonality_checks(cfg: SolveConfig) -> List[CheckResult]:
    if cfg.problem == ProblemKind.OSCILLATOR:
        spec = oscillator_basis(cfg.oscillator_scale, cfg.angular_momentum)
        energy = oscillator_spectrum_analytic(0, cfg.angular_momentum, cfg.potential.get('omega'))
        matrix = quadrature_assemble(
            spec, cfg.potential, energy, CHECK_SIZE, angular_momentum=cfg.angular_momentum
        )
        defect = tridiagonality_defect(matrix)
        return [CheckResult(
            f'oscillator wave operator is tridiagonal {_label(cfg)}',
            defect < TRIDIAGONALITY_TOLERANCE,
            f'defect {defect:.3g}'
        )]
    _, _, ur = dimensionless_strengths(cfg.potential)
    scale = cfg.potential.get('lambda')
    nu = centrifugal_nu(ur)
    mu = _energy_basis_mu(cfg)
    energy = -mu * mu / 4 * scale * scale / 2
    matrix = quadrature_assemble(
        three_parameter_basis(mu, nu, scale), cfg.potential, energy, CHECK_SIZE
    )
    defect = tridiagonality_defect(matrix)
    misconfigured = BasisSpec.jacobi(
        mu / 2, nu / 2, mu, nu, CoordinateMap(MapName.SHIFTED_EXP, scale)
    )
    control = tridiagonality_defect(quadrature_assemble(
        misconfigured, cfg.potential, energy, CHECK_SIZE,
        n_quad=200, convergence_tolerance=None
    ))
    return [
        CheckResult(
            f'energy-tied wave operator is tridiagonal {_label(cfg)}',
            defect < TRIDIAGONALITY_TOLERANCE,
            f'defect {defect:.3g} at mu={mu:g}'
        ),
        CheckResult(
            f'misconfigured basis is rejected {_label(cfg)}',
            control > NEGATIVE_CONTROL_DEFECT,
            f'defect {control:.3g} with beta = nu / 2'
        )
    ]


# consistency reduction

def _consistency_checks(cfg: SolveConfig) -> List[CheckResult]:
    if cfg.problem == ProblemKind.OSCILLATOR:
        return []
    u0, u1, ur = dimensionless_strengths(cfg.potential)
    scale = cfg.potential.get('lambda')
    rng = np.random.default_rng(seed=20)
    worst = 0.0
    for epsilon in -rng.uniform(0.05, 20.0, size=CONSISTENCY_SAMPLES):
        mu = math.sqrt(-4 * epsilon)
        matrices = assemble_fixed_basis(u0, u1, ur, scale, mu, CHECK_SIZE)
        tridiagonal = assemble_tridiagonal(u0, u1, ur, scale, mu, CHECK_SIZE)(epsilon)
        difference = matrices.t - epsilon * matrices.w - tridiagonal.to_dense()
        worst = max(worst, _relative_max(difference, matrices.t))
    return [CheckResult(
        f'fixed-basis problem reduces to the tridiagonal operator {_label(cfg)}',
        worst < CONSISTENCY_TOLERANCE,
        f'worst relative deviation {worst:.3g} over {CONSISTENCY_SAMPLES} energies'
    )]


# oracle comparison

def _oscillator_oracle_checks(cfg: SolveConfig) -> List[CheckResult]:
    omega = cfg.potential.get('omega')
    expected = np.array([
        oscillator_spectrum_analytic(n, cfg.angular_momentum, omega) for n in range(5)
    ])
    cfg = dataclasses.replace(cfg, basis_size=ORACLE_BASIS_SIZE, sweep_sizes=())
    computed = np.array(solve_levels(cfg).energies[:5])
    grid = FDGrid(x_min=1e-8, x_max=10 / omega)
    reference = np.array(fd_spectrum(cfg.potential, cfg.angular_momentum, grid, 5))
    tra_error = float(np.max(np.abs(computed - expected)))
    fd_error = float(np.max(np.abs(reference - expected)))
    return [
        CheckResult(
            f'oscillator levels match the analytic spectrum {_label(cfg)}',
            tra_error < ANALYTIC_TOLERANCE,
            f'max |dE| = {tra_error:.3g}'
        ),
        CheckResult(
            f'finite differences match the analytic spectrum {_label(cfg)}',
            fd_error < FD_ANALYTIC_TOLERANCE,
            f'max |dE| = {fd_error:.3g}'
        )
    ]


def _bound_energies(cfg: SolveConfig, mode: SolverMode) -> List[float]:
    levels = solve_levels(
        dataclasses.replace(cfg, basis_size=ORACLE_BASIS_SIZE, mode=mode, sweep_sizes=())
    )
    return [
        energy for energy, bound in zip(levels.energies, levels.bound_flags) if bound
    ]


def _three_parameter_oracle_checks(cfg: SolveConfig) -> List[CheckResult]:
    grid = FDGrid.for_three_parameter(cfg.potential.get('lambda'))
    count = fd_bound_state_count(cfg.potential, 0, grid)
    self_consistent = _bound_energies(cfg, SolverMode.SELF_CONSISTENT)
    checks = [CheckResult(
        f'bound-state count matches finite differences {_label(cfg)}',
        len(self_consistent) == count,
        f'{len(self_consistent)} energy-tied levels, {count} finite-difference levels'
    )]
    if not count:
        return checks
    reference = np.array(fd_spectrum(cfg.potential, 0, grid, count))
    errors_by_mode: Dict[str, np.ndarray] = {}
    for mode in ORACLE_MODES:
        energies = _bound_energies(cfg, mode)
        if len(energies) < count:
            energies = energies + [math.inf] * (count - len(energies))
        errors_by_mode[mode.value] = np.abs(
            (np.array(energies[:count]) - reference) / reference
        )
    best = np.min(np.array(list(errors_by_mode.values())), axis=0)
    detail = ', '.join(
        f'{mode}: {float(np.max(errors)):.3g}' for mode, errors in errors_by_mode.items()
    )
    checks.append(CheckResult(
        f'bound-state energies match finite differences {_label(cfg)}',
        float(np.max(best)) < FD_RELATIVE_TOLERANCE,
        f'worst relative error per mode: {detail}'
    ))
    return checks


def _oracle_checks(cfg: SolveConfig) -> List[CheckResult]:
    if cfg.problem == ProblemKind.OSCILLATOR:
        return _oscillator_oracle_checks(cfg)
    return _three_parameter_oracle_checks(cfg)


# energy-scale reconciliation

def reconcile_oscillator_energy_scale(
    omega: float = 1.0, angular_momentum: int = 0, size: int = 40
) -> Dict[str, List[bool]]:
    """
    For each candidate relation between oscillator eigenvalues and energies, whether
    it reproduces the analytic spectrum at each tested basis scale.
    """
    expected = np.array([
        oscillator_spectrum_analytic(n, angular_momentum, omega) for n in range(5)
    ])
    matches: Dict[str, List[bool]] = {}
    for factor in RECONCILIATION_SCALE_FACTORS:
        scale = factor * math.sqrt(2) * omega ** 2
        operator = assemble_oscillator(omega, scale, angular_momentum, size)
        eigenvalues = eig_tridiag(operator.hamiltonian).values[:5]
        for name, energy_scale in oscillator_energy_scale_candidates(scale).items():
            error = float(np.max(np.abs(energy_scale * eigenvalues - expected)))
            matches.setdefault(name, []).append(error < ANALYTIC_TOLERANCE)
    LOGGER.info('Oscillator energy-scale candidates: %r', matches)
    return matches


def _reconciliation_checks(cfg: SolveConfig) -> List[CheckResult]:
    if cfg.problem != ProblemKind.OSCILLATOR:
        return []
    matches = reconcile_oscillator_energy_scale(
        cfg.potential.get('omega'), cfg.angular_momentum
    )
    consistent = [name for name, flags in matches.items() if all(flags)]
    reference = fd_spectrum(
        cfg.potential, cfg.angular_momentum,
        FDGrid(x_min=1e-8, x_max=10 / cfg.potential.get('omega')), 1
    )[0]
    expected = oscillator_spectrum_analytic(0, cfg.angular_momentum, cfg.potential.get('omega'))
    return [
        CheckResult(
            f'exactly one energy scale is consistent {_label(cfg)}',
            len(consistent) == 1,
            f'consistent candidates: {consistent}'
        ),
        CheckResult(
            f'finite differences confirm the ground state {_label(cfg)}',
            abs(reference - expected) < FD_ANALYTIC_TOLERANCE,
            f'E_0 = {reference:.12g}, analytic {expected:.12g}'
        )
    ]


SUITES: Dict[str, Callable[[SolveConfig], List[CheckResult]]] = {
    'orthonormality': _orthonormality_checks,
    'tridiagonality': _tridiagonality_checks,
    'consistency-reduction': _consistency_checks,
    'oracle-comparison': _oracle_checks,
    'factor-reconciliation': _reconciliation_checks
}


def resolve_suite_names(suite: str) -> List[str]:
    if suite == ALL_SUITES:
        return list(SUITES)
    if suite not in SUITES:
        raise ConfigError(f'unknown suite {suite!r}, expected one of {[ALL_SUITES, *SUITES]}')
    return [suite]


def run_suite(name: str, problems: Sequence[SolveConfig]) -> SuiteReport:
    checks: List[CheckResult] = []
    for cfg in problems:
        try:
            checks.extend(SUITES[name](cfg))
        except TraSolverError as exc:
            LOGGER.warning('Suite %s failed on %s: %r', name, _label(cfg), exc)
            checks.append(CheckResult(f'{name} {_label(cfg)}', False, repr(exc)))
    LOGGER.info(
        'Suite %s: %d/%d checks passed',
        name, sum(check.passed for check in checks), len(checks)
    )
    return SuiteReport(suite=name, checks=checks)


def run_verification(
    suite: str,
    problems: Optional[Sequence[SolveConfig]] = None,
    max_workers: int = 5
) -> SuiteReport:
    names = resolve_suite_names(suite)
    problems = list(problems) if problems is not None else default_problems()
    reports: Dict[str, SuiteReport] = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        name_by_future = {
            executor.submit(run_suite, name, problems): name
            for name in names
        }
        for future in concurrent.futures.as_completed(name_by_future):
            name = name_by_future[future]
            try:
                reports[name] = future.result()
            except Exception as exc:  # pylint: disable=broad-except
                LOGGER.warning('Suite %s raised: %r', name, exc)
                reports[name] = SuiteReport(name, [CheckResult(name, False, repr(exc))])
    if len(names) == 1:
        return reports[names[0]]
    return SuiteReport(
        suite=suite,
        checks=[
            check._replace(name=f'{name}: {check.name}')
            for name in names
            for check in reports[name].checks
        ]
    )
