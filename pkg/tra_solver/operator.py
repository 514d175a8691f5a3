import logging
import math
from typing import Callable, Dict, NamedTuple, Optional

import numpy as np

from tra_solver.basis import (
    BasisSpec,
    CoordinateMap,
    MapName,
    gauss_quadrature,
    map_eval,
    map_inverse,
    normalization,
    position_matrix,
    quadrature_remainder,
    reduced_derivatives
)
from tra_solver.eigensolve import SymTridiag, check_symmetric, eig_tridiag, symmetry_defect
from tra_solver.errors import ParameterDomainError, QuadratureConvergenceError
from tra_solver.orthopoly import PolynomialFamily, eval_sequence, jacobi_norm
from tra_solver.potentials import PotentialSpec, transformed_potential


LOGGER = logging.getLogger(__name__)


DEFAULT_QUADRATURE_TOLERANCE = 1e-9


def default_quadrature_size(size: int) -> int:
    return 2 * size + 8


# oscillator

class OscillatorOperator(NamedTuple):
    hamiltonian: SymTridiag
    energy_scale: float
    nu: float


def oscillator_map_scale(scale: float) -> float:
    """
    Scale of the quadratic map y = (s r)^2 for which the oscillator matrix carries
    omega^4 / scale^2, i.e. scale = sqrt(2) s^2.
    """
    return math.sqrt(scale / math.sqrt(2))


def oscillator_energy_scale_candidates(scale: float) -> Dict[str, float]:
    return {
        'lambda^2': scale * scale,
        'lambda^2/2': scale * scale / 2,
        'lambda/sqrt(2)': scale / math.sqrt(2),
        'lambda^2/sqrt(2)': scale * scale / math.sqrt(2)
    }


def oscillator_basis(scale: float, angular_momentum: int) -> BasisSpec:
    return BasisSpec.laguerre(
        alpha=(angular_momentum + 1) / 2,
        beta=0.5,
        nu=angular_momentum + 0.5,
        coordinate_map=CoordinateMap(MapName.QUADRATIC, oscillator_map_scale(scale))
    )


def assemble_oscillator(
    omega: float, scale: float, angular_momentum: int, size: int
) -> OscillatorOperator:
    """
    Tridiagonal oscillator matrix in the Laguerre basis with beta = 1/2 and
    2 alpha = l + 1; energies are energy_scale times its eigenvalues.
    """
    if not omega > 0 or not scale > 0:
        raise ParameterDomainError(f'omega and lambda must be positive: {omega!r}, {scale!r}')
    if angular_momentum < 0:
        raise ParameterDomainError(f'angular momentum must be nonnegative: {angular_momentum}')
    if size < 1:
        raise ParameterDomainError(f'basis size must be positive: {size}')
    nu = angular_momentum + 0.5
    ratio = omega ** 4 / scale ** 2
    n = np.arange(size, dtype=float)
    diagonal = (2 * n + nu + 1) * (0.5 + ratio)
    off_diagonal = (0.5 - ratio) * np.sqrt((n[:-1] + 1) * (n[:-1] + nu + 1))
    return OscillatorOperator(
        hamiltonian=SymTridiag(d=diagonal, e=off_diagonal),
        energy_scale=scale / math.sqrt(2),
        nu=nu
    )


# three-parameter potential in the shifted exponential Jacobi basis

class ThreeTermCoeffs(NamedTuple):
    c: np.ndarray
    d: np.ndarray
    u0: float
    u1: float
    ur: float
    scale: float
    mu: float
    nu: float


def centrifugal_nu(ur: float) -> float:
    """
    nu = sqrt(1 + 4 u_R), which removes the 1/(1+y) terms of the wave operator.
    """
    if ur < -0.25:
        raise ParameterDomainError(f'u_R must be at least -1/4: {ur!r}')
    return math.sqrt(1 + 4 * ur)


def three_parameter_basis(mu: float, nu: float, scale: float) -> BasisSpec:
    return BasisSpec.jacobi(
        alpha=mu / 2,
        beta=(nu + 1) / 2,
        mu=mu,
        nu=nu,
        coordinate_map=CoordinateMap(MapName.SHIFTED_EXP, scale)
    )


def three_term_coeffs(
    u0: float, u1: float, ur: float, scale: float, mu: float, size: int
) -> ThreeTermCoeffs:
    if not mu > -1:
        raise ParameterDomainError(f'mu must exceed -1: {mu!r}')
    if not scale > 0:
        raise ParameterDomainError(f'lambda must be positive: {scale!r}')
    nu = centrifugal_nu(ur)
    position = position_matrix(PolynomialFamily.jacobi(mu, nu), size)
    return ThreeTermCoeffs(
        c=position.d, d=position.e, u0=u0, u1=u1, ur=ur, scale=scale, mu=mu, nu=nu
    )


def _shifted_squares(size: int, mu: float, nu: float) -> np.ndarray:
    return (np.arange(size) + (mu + nu + 1) / 2) ** 2


def assemble_tridiagonal(
    u0: float, u1: float, ur: float, scale: float, mu: float, size: int
) -> Callable[[float], SymTridiag]:
    """
    Returns epsilon -> (2 / lambda^2) J, exact when mu^2 = -4 epsilon.
    """
    coeffs = three_term_coeffs(u0, u1, ur, scale, mu, size)
    base = _shifted_squares(size, mu, coeffs.nu) + u0 + u1 * coeffs.c
    off_diagonal = u1 * coeffs.d

    def wave_operator(epsilon: float) -> SymTridiag:
        return SymTridiag(d=base + epsilon, e=off_diagonal)

    return wave_operator


def assemble_self_consistent(
    u0: float, u1: float, ur: float, scale: float, size: int
) -> Callable[[float], SymTridiag]:
    """
    Returns epsilon -> (2 / lambda^2) J with the basis tied to the energy, mu = sqrt(-4 epsilon).
    """
    centrifugal_nu(ur)

    def wave_operator(epsilon: float) -> SymTridiag:
        if epsilon > 0:
            raise ParameterDomainError(f'bound-state energies are negative: {epsilon!r}')
        mu = math.sqrt(-4 * epsilon)
        return assemble_tridiagonal(u0, u1, ur, scale, mu, size)(epsilon)

    return wave_operator


class FixedBasisMatrices(NamedTuple):
    """
    Physical condition: t f = epsilon w f.
    """
    t: np.ndarray
    w: np.ndarray
    mu: float
    nu: float


def _from_spectrum(vectors: np.ndarray, values: np.ndarray) -> np.ndarray:
    dense = (vectors * values) @ vectors.T
    return 0.5 * (dense + dense.T)


def inverse_gap_block(mu: float, nu: float, size: int) -> np.ndarray:
    """
    Leading size x size block of (I - Y)^-1 in the orthonormal Jacobi(mu, nu) basis.

    The entries are integrals of p_m p_n against (1-y)^(mu-1) (1+y)^nu, so a Gauss rule
    for that weight with size + 1 nodes gives them exactly. Needs mu > 0.
    """
    if not mu > 0:
        raise ParameterDomainError(f'(I - Y)^-1 is unbounded for mu={mu!r}')
    rule = gauss_quadrature(PolynomialFamily.jacobi(mu - 1, nu), size + 1)
    family = PolynomialFamily.jacobi(mu, nu, normalized=True)
    values = np.array([eval_sequence(family, float(y), size - 1) for y in rule.nodes]).real
    block = (values.T * rule.weights) @ values / jacobi_norm(0, mu, nu)
    return 0.5 * (block + block.T)


def assemble_fixed_basis(
    u0: float, u1: float, ur: float, scale: float, mu: float, size: int
) -> FixedBasisMatrices:
    """
    With the basis held fixed the wave operator is (2 / lambda^2) J = t - epsilon w where
    t = B^2 + u0 + u1 Y - (mu^2 / 2)(I - Y)^-1 and w = (I + Y)(I - Y)^-1 = 2 (I - Y)^-1 - I.

    For mu > 0 the (I - Y)^-1 block is integrated exactly. At mu = 0 the basis functions
    are not normalizable and the inverse of the truncated position matrix is used.
    """
    coeffs = three_term_coeffs(u0, u1, ur, scale, mu, size)
    position = SymTridiag(d=coeffs.c, e=coeffs.d)
    if mu > 0:
        inverse = inverse_gap_block(mu, coeffs.nu, size)
    else:
        spectrum = eig_tridiag(position, want_vectors=True)
        assert spectrum.vectors is not None
        if np.max(spectrum.values) >= 1.0:
            raise ParameterDomainError('I - Y is singular')
        inverse = _from_spectrum(spectrum.vectors, 1 / (1 - spectrum.values))
    w = 2 * inverse - np.eye(size)
    t = (
        np.diag(_shifted_squares(size, mu, coeffs.nu) + u0)
        + u1 * position.to_dense()
        - (mu * mu / 2) * inverse
    )
    return FixedBasisMatrices(
        t=check_symmetric(t), w=check_symmetric(w), mu=mu, nu=coeffs.nu
    )


# quadrature assembly

def _quadrature_matrix(
    spec: BasisSpec,
    potential: PotentialSpec,
    energy: float,
    size: int,
    n_quad: int,
    angular_momentum: int
) -> np.ndarray:
    rule = gauss_quadrature(spec.polynomial_family, n_quad)
    coordinate_map = spec.coordinate_map
    values = np.zeros((n_quad, size))
    applied = np.zeros((n_quad, size))
    for k, node in enumerate(rule.nodes):
        y = float(node)
        x = map_inverse(coordinate_map, y)
        derivatives = map_eval(coordinate_map, x)
        reduced = reduced_derivatives(spec, size - 1, y)
        potential_value = transformed_potential(potential, coordinate_map, y)
        if angular_momentum:
            potential_value += angular_momentum * (angular_momentum + 1) / (2 * x * x)
        values[k] = reduced.value
        applied[k] = (
            -0.5 * (derivatives.dy ** 2 * reduced.second + derivatives.d2y * reduced.first)
            + (potential_value - energy) * reduced.value
        )
    weights = rule.weights * np.array([quadrature_remainder(spec, float(y)) for y in rule.nodes])
    factors = np.array([normalization(spec, n) for n in range(size)])
    return np.outer(factors, factors) * (values.T @ (applied * weights[:, np.newaxis]))


def quadrature_assemble(
    spec: BasisSpec,
    potential: PotentialSpec,
    energy: float,
    size: int,
    n_quad: Optional[int] = None,
    angular_momentum: int = 0,
    convergence_tolerance: Optional[float] = DEFAULT_QUADRATURE_TOLERANCE
) -> np.ndarray:
    """
    <phi_m | H - E | phi_n> by Gauss quadrature of the transformed operator.

    The rule is checked against one of twice the size unless `convergence_tolerance` is None.
    """
    if size < 1:
        raise ParameterDomainError(f'basis size must be positive: {size}')
    n_quad = n_quad or default_quadrature_size(size)
    matrix = _quadrature_matrix(spec, potential, energy, size, n_quad, angular_momentum)
    if convergence_tolerance is not None:
        refined = _quadrature_matrix(spec, potential, energy, size, 2 * n_quad, angular_momentum)
        change = float(np.max(np.abs(refined - matrix))) / max(
            float(np.max(np.abs(refined))), np.finfo(float).tiny
        )
        LOGGER.debug('quadrature doubling %d -> %d changed by %.3g', n_quad, 2 * n_quad, change)
        if change > convergence_tolerance:
            raise QuadratureConvergenceError(
                f'quadrature with {n_quad} nodes changed by {change:.3g} on doubling', change
            )
        matrix = refined
    LOGGER.debug('quadrature matrix symmetry defect %.3g', symmetry_defect(matrix))
    return 0.5 * (matrix + matrix.T)


def tridiagonality_defect(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix, dtype=float)
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if scale == 0 or matrix.shape[0] < 3:
        return 0.0
    rows, columns = np.indices(matrix.shape)
    outside = np.abs(matrix[np.abs(rows - columns) >= 2])
    return float(np.max(outside)) / scale
