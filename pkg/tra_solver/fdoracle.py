import logging
import math
from typing import List, NamedTuple, Tuple

import numpy as np
import scipy.linalg

from tra_solver.errors import ConvergenceError, ParameterDomainError, StateIndexError
from tra_solver.potentials import PotentialSpec, effective_potential, potential_eval
from tra_solver.solver import WavefunctionSample, fix_sign


LOGGER = logging.getLogger(__name__)


MIN_POINTS = 200

DEFAULT_POINTS = 4000

DEFAULT_RICHARDSON_TOLERANCE = 1e-6

MAX_REFINEMENTS = 6


class FDGrid(NamedTuple):
    """
    `n_points` interior points between Dirichlet walls at x_min and x_max.
    """
    x_min: float
    x_max: float
    n_points: int = DEFAULT_POINTS
    effective: bool = True

    @staticmethod
    def for_three_parameter(scale: float) -> 'FDGrid':
        return FDGrid(x_min=1e-4, x_max=30 / scale, n_points=DEFAULT_POINTS)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points + 1)

    def points(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(1, self.n_points + 1)

    def refined(self) -> 'FDGrid':
        return self._replace(n_points=2 * self.n_points + 1)


def validate_grid(grid: FDGrid, potential: PotentialSpec) -> None:
    if grid.n_points < MIN_POINTS:
        raise ParameterDomainError(f'FD grid needs at least {MIN_POINTS} points: {grid.n_points}')
    if not grid.x_min < grid.x_max:
        raise ParameterDomainError(f'FD grid needs x_min < x_max: {grid.x_min}, {grid.x_max}')
    low, high = potential.domain
    if grid.x_min < low or grid.x_max > high:
        raise ParameterDomainError(
            f'FD grid [{grid.x_min}, {grid.x_max}] leaves the domain of {potential.name.value}'
        )
    if potential.is_radial and not grid.x_min > 0:
        raise ParameterDomainError('radial problems need x_min > 0')


def _discretize(
    potential: PotentialSpec, angular_momentum: int, grid: FDGrid
) -> Tuple[np.ndarray, np.ndarray]:
    spacing = grid.spacing
    points = grid.points()
    if grid.effective:
        potential_values = np.array([
            effective_potential(potential, float(x), angular_momentum) for x in points
        ])
    else:
        potential_values = np.array([potential_eval(potential, float(x)) for x in points])
    diagonal = 1 / spacing ** 2 + potential_values
    off_diagonal = np.full(grid.n_points - 1, -0.5 / spacing ** 2)
    return diagonal, off_diagonal


def fd_levels(
    potential: PotentialSpec, angular_momentum: int, grid: FDGrid, count: int
) -> np.ndarray:
    """
    Lowest `count` eigenvalues of the central-difference operator on one grid.
    """
    validate_grid(grid, potential)
    if not 1 <= count <= grid.n_points:
        raise ParameterDomainError(f'cannot return {count} levels from {grid.n_points} points')
    diagonal, off_diagonal = _discretize(potential, angular_momentum, grid)
    return scipy.linalg.eigh_tridiagonal(
        diagonal, off_diagonal, eigvals_only=True, select='i', select_range=(0, count - 1)
    )


def richardson_error_ratios(
    potential: PotentialSpec, angular_momentum: int, grid: FDGrid, count: int
) -> np.ndarray:
    """
    (E_h - E_h/2) / (E_h/2 - E_h/4) per level, close to 4 for a second-order scheme.
    """
    coarse = fd_levels(potential, angular_momentum, grid, count)
    middle = fd_levels(potential, angular_momentum, grid.refined(), count)
    fine = fd_levels(potential, angular_momentum, grid.refined().refined(), count)
    return (coarse - middle) / (middle - fine)


def fd_spectrum(
    potential: PotentialSpec,
    angular_momentum: int,
    grid: FDGrid,
    count: int,
    tolerance: float = DEFAULT_RICHARDSON_TOLERANCE,
    max_refinements: int = MAX_REFINEMENTS
) -> List[float]:
    """
    Lowest `count` levels, Richardson-extrapolated from successive grid doublings.

    Doubling stops once two consecutive extrapolated spectra agree to `tolerance`.
    Raises ConvergenceError when that needs more than `max_refinements` doublings.
    """
    current = grid
    levels = [fd_levels(potential, angular_momentum, current, count)]
    extrapolated: List[np.ndarray] = []
    change = math.inf
    for _ in range(max_refinements):
        current = current.refined()
        levels.append(fd_levels(potential, angular_momentum, current, count))
        extrapolated.append((4 * levels[-1] - levels[-2]) / 3)
        if len(extrapolated) < 2:
            continue
        change = float(np.max(np.abs(extrapolated[-1] - extrapolated[-2])))
        LOGGER.debug(
            'FD spectrum of %s on %d points: Richardson change %.3g',
            potential.name.value, current.n_points, change
        )
        if change <= tolerance:
            return [float(value) for value in extrapolated[-1]]
    raise ConvergenceError(
        f'FD levels changed by {change:.3g} after {max_refinements} grid doublings'
        f' (tolerance {tolerance:g})'
    )


def fd_bound_state_count(
    potential: PotentialSpec, angular_momentum: int, grid: FDGrid, threshold: float = 0.0
) -> int:
    validate_grid(grid, potential)
    diagonal, off_diagonal = _discretize(potential, angular_momentum, grid)
    values = scipy.linalg.eigh_tridiagonal(
        diagonal, off_diagonal, eigvals_only=True, select='v',
        select_range=(float(np.min(diagonal)) - 1 / grid.spacing ** 2 - 1.0, threshold)
    )
    return len(values)


def fd_wavefunction(
    potential: PotentialSpec,
    angular_momentum: int,
    grid: FDGrid,
    state: int,
    bound_only: bool = True
) -> WavefunctionSample:
    """
    Sampled on the interior points plus both walls, where the state is pinned to zero.
    """
    validate_grid(grid, potential)
    if state < 0:
        raise StateIndexError(state, 0)
    if bound_only:
        available = fd_bound_state_count(potential, angular_momentum, grid)
        if state >= available:
            raise StateIndexError(state, available)
    diagonal, off_diagonal = _discretize(potential, angular_momentum, grid)
    values, vectors = scipy.linalg.eigh_tridiagonal(
        diagonal, off_diagonal, select='i', select_range=(state, state)
    )
    psi = vectors[:, 0]
    norm = float(np.sqrt(np.sum(psi * psi) * grid.spacing))
    psi = fix_sign(psi / norm)
    return WavefunctionSample(
        energy=float(values[0]),
        coefficients=np.zeros(0),
        x=np.concatenate([[grid.x_min], grid.points(), [grid.x_max]]),
        values=np.concatenate([[0.0], psi, [0.0]]),
        norm=1.0
    )
