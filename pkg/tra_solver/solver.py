import concurrent.futures
import dataclasses
import enum
import logging
import math
import time
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.integrate
import scipy.optimize

from tra_solver.basis import BasisSpec, basis_eval_all
from tra_solver.eigensolve import SymTridiag, eig_generalized, eig_tridiag
from tra_solver.errors import (
    ConvergenceError,
    ParameterDomainError,
    TraSolverError,
    ZeroDivisorError
)
from tra_solver.operator import (
    assemble_fixed_basis,
    assemble_oscillator,
    assemble_tridiagonal,
    centrifugal_nu,
    oscillator_basis,
    oscillator_map_scale,
    three_parameter_basis
)
from tra_solver.potentials import PotentialName, PotentialSpec, dimensionless_strengths


LOGGER = logging.getLogger(__name__)


DEFAULT_BASIS_SIZE = 20

DEFAULT_SWEEP_SIZES = (10, 20, 30, 40, 50)

DEFAULT_FIXED_MU = 1.0

BOUND_TAIL_FRACTION = 0.01

MAX_DIGITS = 15

POORLY_CONVERGED_DIGITS = 6

SELF_CONSISTENT_XTOL = 1e-12

SELF_CONSISTENT_MAX_ITERATIONS = 100

SELF_CONSISTENT_EDGE = -1e-12

MAX_BRACKET_DOUBLINGS = 60

WAVEFUNCTION_POINTS = 600

# u0 = -6, u1 = 10, ur = 2.5, lambda = 1, N = 20
REFERENCE_SPECTRUM = (
    4126.9891447498, 1542.8903686294, 787.2186135745, 462.6214937613, 294.0660278716,
    195.9554935304, 134.3972745542, 93.7323498172, 65.8910440926, 46.3583338365,
    32.4394977694, 22.4398560240, 15.2463797234, 10.1007245429, 6.4695140302,
    3.9657920559, 2.2930653158, 0.0664830132, 0.4757637553, 1.1960489428
)


class ProblemKind(str, enum.Enum):
    OSCILLATOR = 'Oscillator'
    THREE_PARAMETER = 'ThreeParameter'


class SolverMode(str, enum.Enum):
    PAPER_LITERAL = 'paper-literal'
    FIXED_BASIS = 'fixed-basis'
    SELF_CONSISTENT = 'self-consistent'


@dataclasses.dataclass(frozen=True)
class SolveConfig:
    potential: PotentialSpec
    angular_momentum: int = 0
    basis_size: int = DEFAULT_BASIS_SIZE
    mode: SolverMode = SolverMode.FIXED_BASIS
    mu: float = DEFAULT_FIXED_MU
    basis_scale: Optional[float] = None
    sweep_sizes: Tuple[int, ...] = DEFAULT_SWEEP_SIZES

    def __post_init__(self):
        if self.potential.name not in (PotentialName.OSCILLATOR, PotentialName.THREE_PARAMETER):
            raise ParameterDomainError(
                f'no TRA pipeline for the {self.potential.name.value} potential'
            )
        if self.basis_size < 1 or any(size < 1 for size in self.sweep_sizes):
            raise ParameterDomainError('basis sizes must be positive')
        if self.angular_momentum < 0:
            raise ParameterDomainError(
                f'angular momentum must be nonnegative: {self.angular_momentum}'
            )
        if self.problem == ProblemKind.THREE_PARAMETER and self.angular_momentum:
            raise ParameterDomainError(
                'the three-parameter potential carries its centrifugal term in VR'
            )
        if not self.mu > -1:
            raise ParameterDomainError(f'mu must exceed -1: {self.mu!r}')
        if self.basis_scale is not None and not self.basis_scale > 0:
            raise ParameterDomainError(f'basis scale must be positive: {self.basis_scale!r}')

    @property
    def problem(self) -> ProblemKind:
        if self.potential.name == PotentialName.OSCILLATOR:
            return ProblemKind.OSCILLATOR
        return ProblemKind.THREE_PARAMETER

    @property
    def oscillator_scale(self) -> float:
        if self.basis_scale is not None:
            return self.basis_scale
        return math.sqrt(2) * self.potential.get('omega') ** 2

    @property
    def mode_label(self) -> str:
        if self.problem == ProblemKind.OSCILLATOR:
            return 'oscillator'
        return self.mode.value


class LevelSet(NamedTuple):
    eigenvalues: List[float]
    energies: List[float]
    bound_flags: List[bool]


class SpectrumResult(NamedTuple):
    mode: str
    size: int
    eigenvalues: List[float]
    energies: List[float]
    bound_flags: List[bool]
    sweep: Dict[int, List[float]]
    converged_digits: List[int]

    def to_dict(self) -> dict:
        return {
            'mode': self.mode,
            'N': self.size,
            'eigenvalues': self.eigenvalues,
            'energies': self.energies,
            'bound_flags': self.bound_flags,
            'sweep': {str(size): values for size, values in sorted(self.sweep.items())},
            'converged_digits': self.converged_digits
        }


class WavefunctionSample(NamedTuple):
    energy: float
    coefficients: np.ndarray
    x: np.ndarray
    values: np.ndarray
    norm: float


def expansion_coeffs(
    a: Sequence[float], b: Sequence[float], energy: float, size: int
) -> np.ndarray:
    """
    f_0 = 1 and f_{n+1} = ((E - a_n) f_n - b_{n-1} f_{n-1}) / b_n.
    """
    if size < 1:
        raise ParameterDomainError(f'coefficient count must be positive: {size}')
    coefficients = np.zeros(size)
    coefficients[0] = 1.0
    for n in range(size - 1):
        if b[n] == 0:
            raise ZeroDivisorError(f'off-diagonal vanishes at n={n}', index=n)
        previous = b[n - 1] * coefficients[n - 1] if n > 0 else 0.0
        coefficients[n + 1] = ((energy - a[n]) * coefficients[n] - previous) / b[n]
    return coefficients


def is_square_summable(coefficients: np.ndarray) -> bool:
    total = float(np.sum(coefficients * coefficients))
    if not math.isfinite(total) or total == 0:
        return False
    tail = coefficients[len(coefficients) // 2 + 1:]
    return float(np.sum(tail * tail)) < BOUND_TAIL_FRACTION * total


def oscillator_spectrum_analytic(n: int, angular_momentum: int, omega: float) -> float:
    return omega ** 2 * (2 * n + angular_momentum + 1.5)


def _oscillator_levels(cfg: SolveConfig, size: int) -> LevelSet:
    operator = assemble_oscillator(
        cfg.potential.get('omega'), cfg.oscillator_scale, cfg.angular_momentum, size
    )
    values = eig_tridiag(operator.hamiltonian).values
    # the oscillator spectrum is purely discrete
    return LevelSet(
        eigenvalues=[float(value) for value in values],
        energies=[float(operator.energy_scale * value) for value in values],
        bound_flags=[True] * size
    )


def self_consistent_levels(
    u0: float, u1: float, ur: float, scale: float, size: int
) -> List[float]:
    """
    Roots of epsilon + kappa_k(sqrt(-4 epsilon)) = 0, where kappa_k(mu) is the k-th
    eigenvalue of the energy-free tridiagonal operator in the basis with that mu.
    """
    centrifugal_nu(ur)

    def residual(epsilon: float, level: int) -> float:
        mu = math.sqrt(-4 * epsilon)
        operator = assemble_tridiagonal(u0, u1, ur, scale, mu, size)(0.0)
        return epsilon + float(eig_tridiag(operator).values[level])

    levels: List[float] = []
    for level in range(size):
        if residual(SELF_CONSISTENT_EDGE, level) >= 0:
            break
        lower = -1.0
        for _ in range(MAX_BRACKET_DOUBLINGS):
            if residual(lower, level) > 0:
                break
            lower *= 2
        else:
            raise ConvergenceError(f'could not bracket level {level} below {lower:g}')
        try:
            epsilon = scipy.optimize.brentq(
                residual, lower, SELF_CONSISTENT_EDGE, args=(level,),
                xtol=SELF_CONSISTENT_XTOL, maxiter=SELF_CONSISTENT_MAX_ITERATIONS
            )
        except RuntimeError as exc:
            raise ConvergenceError(f'self-consistent level {level} did not converge') from exc
        LOGGER.debug('self-consistent level %d: epsilon=%.12g', level, epsilon)
        levels.append(float(epsilon))
    return sorted(levels)


def recursion_solution(matrix: SymTridiag, energy: float) -> np.ndarray:
    """
    Coefficients obeying the three-term recursion of `matrix` at the eigenvalue
    nearest `energy`, scaled to unit norm with f_0 >= 0.

    Forward recursion amplifies rounding in the tail, so the eigenvector of the
    truncated matrix is used instead; it satisfies the same recursion.
    """
    result = eig_tridiag(matrix, want_vectors=True)
    assert result.vectors is not None
    vector = result.vectors[:, int(np.argmin(np.abs(result.values - energy)))]
    return -vector if vector[0] < 0 else vector


def _self_consistent_coefficients(
    u0: float, u1: float, ur: float, scale: float, epsilon: float, size: int
) -> np.ndarray:
    operator = assemble_tridiagonal(u0, u1, ur, scale, math.sqrt(-4 * epsilon), size)(0.0)
    return recursion_solution(operator, -epsilon)


def _fixed_basis_mu(cfg: SolveConfig) -> float:
    return 0.0 if cfg.mode == SolverMode.PAPER_LITERAL else cfg.mu


def _fixed_basis_problem(cfg: SolveConfig, size: int) -> Tuple[np.ndarray, np.ndarray]:
    u0, u1, ur = dimensionless_strengths(cfg.potential)
    scale = cfg.potential.get('lambda')
    mu = _fixed_basis_mu(cfg)
    overlap = assemble_fixed_basis(u0, u1, ur, scale, mu, size).w
    if cfg.mode == SolverMode.PAPER_LITERAL:
        # the energy-free tridiagonal operator at mu = 0
        hamiltonian = assemble_tridiagonal(u0, u1, ur, scale, 0.0, size)(0.0).to_dense()
    else:
        hamiltonian = assemble_fixed_basis(u0, u1, ur, scale, mu, size).t
    return hamiltonian, overlap


def _three_parameter_levels(cfg: SolveConfig, size: int) -> LevelSet:
    u0, u1, ur = dimensionless_strengths(cfg.potential)
    scale = cfg.potential.get('lambda')
    if cfg.mode == SolverMode.SELF_CONSISTENT:
        eigenvalues = self_consistent_levels(u0, u1, ur, scale, size)
        flags = [
            is_square_summable(_self_consistent_coefficients(u0, u1, ur, scale, value, size))
            for value in eigenvalues
        ]
    else:
        hamiltonian, overlap = _fixed_basis_problem(cfg, size)
        result = eig_generalized(hamiltonian, overlap, want_vectors=True)
        assert result.vectors is not None
        eigenvalues = [float(value) for value in result.values]
        flags = [
            value < 0 and is_square_summable(result.vectors[:, k])
            for k, value in enumerate(eigenvalues)
        ]
    return LevelSet(
        eigenvalues=eigenvalues,
        energies=[scale * scale * value / 2 for value in eigenvalues],
        bound_flags=flags
    )


def solve_levels(cfg: SolveConfig, size: Optional[int] = None) -> LevelSet:
    size = size or cfg.basis_size
    if cfg.problem == ProblemKind.OSCILLATOR:
        return _oscillator_levels(cfg, size)
    return _three_parameter_levels(cfg, size)


def converged_digits(previous: Sequence[float], current: Sequence[float]) -> List[int]:
    digits = []
    for old, new in zip(previous, current):
        change = abs(new - old)
        if change == 0:
            digits.append(MAX_DIGITS)
            continue
        relative = change / max(abs(new), np.finfo(float).tiny)
        digits.append(int(min(MAX_DIGITS, max(0, math.floor(-math.log10(relative))))))
    return digits


def run_sweep(cfg: SolveConfig, max_workers: int = 4) -> Dict[int, List[float]]:
    """
    Energies for every sweep size; sizes that fail to solve are logged and left out.
    """
    sweep: Dict[int, List[float]] = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        size_by_future = {
            executor.submit(solve_levels, cfg, size): size
            for size in cfg.sweep_sizes
        }
        for future in concurrent.futures.as_completed(size_by_future):
            size = size_by_future[future]
            try:
                sweep[size] = future.result().energies
            except TraSolverError as exc:
                LOGGER.warning('Sweep member N=%d failed: %r', size, exc)
    return sweep


def solve_spectrum(cfg: SolveConfig) -> SpectrumResult:
    start_time = time.monotonic()
    levels = solve_levels(cfg)
    sweep = run_sweep(cfg) if cfg.sweep_sizes else {}
    digits: List[int] = []
    if len(sweep) >= 2:
        largest, second = sorted(sweep)[-1], sorted(sweep)[-2]
        digits = converged_digits(sweep[second], sweep[largest])
        for level, count in enumerate(digits):
            if count < POORLY_CONVERGED_DIGITS and level < sum(levels.bound_flags):
                LOGGER.warning(
                    'Level %d converged to %d digits between N=%d and N=%d',
                    level, count, second, largest
                )
    LOGGER.info(
        'Solved %s (%s) N=%d: %d levels, %d bound, in %.3f seconds',
        cfg.potential.name.value, cfg.mode_label, cfg.basis_size,
        len(levels.eigenvalues), sum(levels.bound_flags), time.monotonic() - start_time
    )
    return SpectrumResult(
        mode=cfg.mode_label,
        size=cfg.basis_size,
        eigenvalues=levels.eigenvalues,
        energies=levels.energies,
        bound_flags=levels.bound_flags,
        sweep=sweep,
        converged_digits=digits
    )


def fix_sign(values: np.ndarray, threshold: float = 1e-6) -> np.ndarray:
    """
    Flips the sign so that the first significant lobe is positive.
    """
    peak = float(np.max(np.abs(values))) if len(values) else 0.0
    significant = np.flatnonzero(np.abs(values) > threshold * peak)
    if peak == 0 or not len(significant):
        return values
    return values if values[significant[0]] > 0 else -values


def node_count(values: np.ndarray, threshold: float = 1e-4) -> int:
    peak = float(np.max(np.abs(values)))
    signs = np.sign(values[np.abs(values) > threshold * peak])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _basis_and_coefficients(cfg: SolveConfig, energy: float) -> Tuple[BasisSpec, np.ndarray]:
    size = cfg.basis_size
    if cfg.problem == ProblemKind.OSCILLATOR:
        operator = assemble_oscillator(
            cfg.potential.get('omega'), cfg.oscillator_scale, cfg.angular_momentum, size
        )
        coefficients = recursion_solution(operator.hamiltonian, energy / operator.energy_scale)
        return oscillator_basis(cfg.oscillator_scale, cfg.angular_momentum), coefficients
    u0, u1, ur = dimensionless_strengths(cfg.potential)
    scale = cfg.potential.get('lambda')
    nu = centrifugal_nu(ur)
    epsilon = 2 * energy / scale ** 2
    if cfg.mode == SolverMode.SELF_CONSISTENT:
        if epsilon >= 0:
            raise ParameterDomainError(f'energy-tied basis needs a bound energy: {energy!r}')
        coefficients = _self_consistent_coefficients(u0, u1, ur, scale, epsilon, size)
        return three_parameter_basis(math.sqrt(-4 * epsilon), nu, scale), coefficients
    hamiltonian_matrix, overlap = _fixed_basis_problem(cfg, size)
    result = eig_generalized(hamiltonian_matrix, overlap, want_vectors=True)
    assert result.vectors is not None
    nearest = int(np.argmin(np.abs(result.values - epsilon)))
    return three_parameter_basis(_fixed_basis_mu(cfg), nu, scale), result.vectors[:, nearest]


def default_wavefunction_grid(cfg: SolveConfig) -> np.ndarray:
    if cfg.problem == ProblemKind.OSCILLATOR:
        scale = oscillator_map_scale(cfg.oscillator_scale)
    else:
        scale = cfg.potential.get('lambda')
    x_min = cfg.potential.domain[0]
    return np.linspace(x_min + 1e-6, 15 / scale, WAVEFUNCTION_POINTS)


def reconstruct_wavefunction(
    cfg: SolveConfig, energy: float, grid: Optional[Sequence[float]] = None
) -> WavefunctionSample:
    """
    psi(x) = sum_n f_n phi_n(x), normalized by the trapezoidal rule on the grid.
    """
    points = np.asarray(default_wavefunction_grid(cfg) if grid is None else grid, dtype=float)
    spec, coefficients = _basis_and_coefficients(cfg, energy)
    size = len(coefficients)
    values = np.array([
        float(np.dot(coefficients, basis_eval_all(spec, size, float(x)))) for x in points
    ])
    norm = math.sqrt(float(scipy.integrate.trapezoid(values * values, points)))
    if not norm > 0 or not math.isfinite(norm):
        raise ParameterDomainError(f'wavefunction at E={energy!r} has norm {norm!r}')
    return WavefunctionSample(
        energy=energy,
        coefficients=coefficients,
        x=points,
        values=fix_sign(values / norm),
        norm=norm
    )


def wavefunction_frame(sample: WavefunctionSample) -> pd.DataFrame:
    return pd.DataFrame({'x': sample.x, 'psi': sample.values})


class ReferenceComparison(NamedTuple):
    hypothesis: str
    index: int
    reference: float
    computed: float
    relative_difference: float
    agrees: bool


SIGN_HYPOTHESES = {
    'epsilon': lambda value: value,
    '-epsilon': lambda value: -value,
    '|epsilon|': abs
}


def compare_with_reference(
    eigenvalues: Sequence[float],
    reference: Sequence[float] = REFERENCE_SPECTRUM,
    tolerance: float = 1e-6
) -> List[ReferenceComparison]:
    """
    Matches every reference value to the nearest transformed eigenvalue under each
    sign hypothesis.
    """
    rows = []
    for hypothesis, transform in SIGN_HYPOTHESES.items():
        candidates = np.array([transform(value) for value in eigenvalues])
        for index, expected in enumerate(reference):
            computed = float(candidates[np.argmin(np.abs(candidates - expected))])
            difference = abs(computed - expected) / max(abs(expected), np.finfo(float).tiny)
            rows.append(ReferenceComparison(
                hypothesis, index, expected, computed, difference, difference < tolerance
            ))
    agreements = {
        hypothesis: sum(row.agrees for row in rows if row.hypothesis == hypothesis)
        for hypothesis in SIGN_HYPOTHESES
    }
    LOGGER.info('Reference agreement by hypothesis: %r', agreements)
    if not any(agreements.values()):
        LOGGER.warning('No computed eigenvalue matches the reference spectrum')
    return rows


def reference_comparison_frame(rows: Sequence[ReferenceComparison]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=list(ReferenceComparison._fields))
