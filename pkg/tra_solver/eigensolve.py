import dataclasses
import logging
import math
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from tra_solver.errors import (
    AsymmetryError,
    ConvergenceError,
    NotPositiveDefiniteError,
    ParameterDomainError
)


LOGGER = logging.getLogger(__name__)


MACHINE_EPSILON = float(np.finfo(float).eps)

DEFAULT_SYMMETRY_TOLERANCE = 1e-12

DEFAULT_SWEEPS_PER_EIGENVALUE = 30

MAX_BISECTIONS = 200


@dataclasses.dataclass(frozen=True)
class SymTridiag:
    """
    Real symmetric tridiagonal matrix: diagonal `d` (N) and off-diagonal `e` (N-1).
    """
    d: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        if len(self.d) < 1 or len(self.e) != len(self.d) - 1:
            raise ParameterDomainError(
                f'tridiagonal shape mismatch: {len(self.d)} diagonal, {len(self.e)} off-diagonal'
            )
        if not (np.all(np.isfinite(self.d)) and np.all(np.isfinite(self.e))):
            raise ParameterDomainError('tridiagonal entries must be finite')

    @staticmethod
    def from_sequences(d: Sequence[float], e: Sequence[float]) -> 'SymTridiag':
        return SymTridiag(d=np.asarray(d, dtype=float), e=np.asarray(e, dtype=float))

    @property
    def size(self) -> int:
        return len(self.d)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.d) + np.diag(self.e, 1) + np.diag(self.e, -1)

    def shifted(self, shift: float) -> 'SymTridiag':
        return SymTridiag(d=self.d + shift, e=self.e)

    def leading(self, size: int) -> 'SymTridiag':
        return SymTridiag(d=self.d[:size], e=self.e[:size - 1])


class EigResult(NamedTuple):
    values: np.ndarray
    vectors: Optional[np.ndarray]
    residual: float


def symmetry_defect(matrix: np.ndarray) -> float:
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.T))) / scale


def check_symmetric(
    matrix: np.ndarray, tolerance: float = DEFAULT_SYMMETRY_TOLERANCE
) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ParameterDomainError(f'expected a square matrix, got shape {matrix.shape}')
    defect = symmetry_defect(matrix)
    if defect > tolerance:
        raise AsymmetryError(f'matrix is not symmetric: relative defect {defect:.3g}', defect)
    return matrix


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _residual(
    matrix: np.ndarray,
    values: np.ndarray,
    vectors: np.ndarray,
    metric: Optional[np.ndarray] = None
) -> float:
    scale = max(float(np.max(np.abs(matrix))), MACHINE_EPSILON)
    right = vectors if metric is None else metric @ vectors
    defects = np.linalg.norm(matrix @ vectors - right * values, axis=0)
    return float(np.max(defects)) / scale


def _ql_implicit(
    diagonal: np.ndarray,
    off_diagonal: np.ndarray,
    vectors: Optional[np.ndarray],
    max_sweeps: int
) -> np.ndarray:
    d = [float(value) for value in diagonal]
    size = len(d)
    e = [float(value) for value in off_diagonal] + [0.0]
    sweeps = 0
    for low in range(size):
        while True:
            m = low
            while m < size - 1:
                if abs(e[m]) <= MACHINE_EPSILON * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == low:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise ConvergenceError(
                    f'QL iteration did not converge within {max_sweeps} sweeps'
                )
            g = (d[low + 1] - d[low]) / (2.0 * e[low])
            r = math.hypot(g, 1.0)
            g = d[m] - d[low] + e[low] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            deflated = False
            for i in range(m - 1, low - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if vectors is not None:
                    rotated = vectors[:, i + 1].copy()
                    vectors[:, i + 1] = s * vectors[:, i] + c * rotated
                    vectors[:, i] = c * vectors[:, i] - s * rotated
            if deflated:
                continue
            d[low] -= p
            e[low] = g
            e[m] = 0.0
    LOGGER.debug('QL converged for N=%d after %d sweeps', size, sweeps)
    return np.array(d)


def eig_tridiag(
    matrix: SymTridiag,
    want_vectors: bool = False,
    sweeps_per_eigenvalue: int = DEFAULT_SWEEPS_PER_EIGENVALUE
) -> EigResult:
    """
    All eigenvalues (ascending) by implicit-shift QL iteration.

    Eigenvectors are orthonormal with their largest-magnitude component positive.
    Without vectors the residual is not computed and reported as NaN.
    """
    max_sweeps = sweeps_per_eigenvalue * matrix.size
    if not want_vectors:
        values = np.sort(_ql_implicit(matrix.d, matrix.e, None, max_sweeps=max_sweeps))
        return EigResult(values=values, vectors=None, residual=math.nan)
    vectors = np.eye(matrix.size)
    values = _ql_implicit(matrix.d, matrix.e, vectors, max_sweeps=max_sweeps)
    order = np.argsort(values, kind='stable')
    values = values[order]
    vectors = _canonical_signs(vectors[:, order])
    residual = _residual(matrix.to_dense(), values, vectors)
    return EigResult(values=values, vectors=vectors, residual=residual)


def householder_tridiagonalize(matrix: np.ndarray) -> Tuple[SymTridiag, np.ndarray]:
    """
    Returns (SymTridiag T, orthogonal Q) with Q^T A Q = T.
    """
    work = np.array(matrix, dtype=float)
    size = work.shape[0]
    transform = np.eye(size)
    for k in range(size - 2):
        column = work[k + 1:, k].copy()
        norm = float(np.linalg.norm(column))
        if norm <= MACHINE_EPSILON * float(np.max(np.abs(work))):
            continue
        alpha = -math.copysign(norm, column[0])
        reflector = column
        reflector[0] -= alpha
        reflector /= np.linalg.norm(reflector)
        work[k + 1:, :] -= 2.0 * np.outer(reflector, reflector @ work[k + 1:, :])
        work[:, k + 1:] -= 2.0 * np.outer(work[:, k + 1:] @ reflector, reflector)
        transform[:, k + 1:] -= 2.0 * np.outer(transform[:, k + 1:] @ reflector, reflector)
    return (
        SymTridiag(d=np.diag(work).copy(), e=np.diag(work, 1).copy()),
        transform
    )


def eig_dense(matrix: np.ndarray, want_vectors: bool = False) -> EigResult:
    matrix = check_symmetric(matrix)
    tridiagonal, transform = householder_tridiagonalize(matrix)
    result = eig_tridiag(tridiagonal, want_vectors=True)
    assert result.vectors is not None
    vectors = _canonical_signs(transform @ result.vectors)
    residual = _residual(matrix, result.values, vectors)
    return EigResult(
        values=result.values, vectors=vectors if want_vectors else None, residual=residual
    )


def cholesky_lower(matrix: np.ndarray) -> np.ndarray:
    size = matrix.shape[0]
    lower = np.zeros_like(matrix, dtype=float)
    for j in range(size):
        pivot = matrix[j, j] - lower[j, :j] @ lower[j, :j]
        if not pivot > 0:
            raise NotPositiveDefiniteError(pivot_index=j, pivot_value=float(pivot))
        lower[j, j] = math.sqrt(pivot)
        lower[j + 1:, j] = (matrix[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def eig_generalized(
    a_matrix: np.ndarray, b_matrix: np.ndarray, want_vectors: bool = False
) -> EigResult:
    """
    Solves A f = lambda B f for symmetric A and symmetric positive-definite B.

    Eigenvectors are B-orthonormal.
    """
    a_matrix = check_symmetric(a_matrix)
    b_matrix = check_symmetric(b_matrix)
    lower = cholesky_lower(b_matrix)
    half = scipy.linalg.solve_triangular(lower, a_matrix, lower=True)
    reduced = scipy.linalg.solve_triangular(lower, half.T, lower=True)
    reduced = 0.5 * (reduced + reduced.T)
    result = eig_dense(reduced, want_vectors=True)
    assert result.vectors is not None
    vectors = scipy.linalg.solve_triangular(lower.T, result.vectors, lower=False)
    residual = _residual(a_matrix, result.values, vectors, metric=b_matrix)
    return EigResult(
        values=result.values, vectors=vectors if want_vectors else None, residual=residual
    )


def determinant_sign(matrix: SymTridiag) -> int:
    """
    Sign of det(M) from the three-term determinant recurrence in ratio form.
    """
    sign = 1
    ratio = 1.0
    for k in range(matrix.size):
        ratio = matrix.d[k] - (matrix.e[k - 1] ** 2 / ratio if k > 0 else 0.0)
        if ratio == 0.0:
            # continue past an exact zero pivot with a tiny positive one
            ratio = MACHINE_EPSILON
        if ratio < 0:
            sign = -sign
    return sign


def det_scan(
    j_of_e: Callable[[float], SymTridiag],
    e_lo: float,
    e_hi: float,
    n_grid: int,
    tolerance: float = 1e-10
) -> List[float]:
    """
    Roots of det J(E) = 0 in [e_lo, e_hi], bracketed on a uniform grid of
    `n_grid` points and refined by bisection.
    """
    if not e_lo < e_hi:
        raise ParameterDomainError(f'det_scan needs e_lo < e_hi: {e_lo!r}, {e_hi!r}')
    if n_grid < 2:
        raise ParameterDomainError(f'det_scan needs at least 2 grid points: {n_grid}')
    grid = np.linspace(e_lo, e_hi, n_grid)
    signs = [determinant_sign(j_of_e(float(energy))) for energy in grid]
    roots: List[float] = []
    for index, energy in enumerate(grid):
        if index == 0 or signs[index - 1] == signs[index]:
            continue
        low, high = float(grid[index - 1]), float(energy)
        low_sign = signs[index - 1]
        for _ in range(MAX_BISECTIONS):
            if high - low <= tolerance:
                break
            middle = 0.5 * (low + high)
            if determinant_sign(j_of_e(middle)) == low_sign:
                low = middle
            else:
                high = middle
        roots.append(0.5 * (low + high))
    LOGGER.debug('det_scan found %d roots in [%g, %g]', len(roots), e_lo, e_hi)
    return roots
