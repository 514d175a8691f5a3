import math

import numpy as np
import pytest

from tra_solver.eigensolve import (
    SymTridiag,
    det_scan,
    determinant_sign,
    eig_dense,
    eig_generalized,
    eig_tridiag,
    householder_tridiagonalize
)
from tra_solver.errors import (
    AsymmetryError,
    ConvergenceError,
    NotPositiveDefiniteError,
    ParameterDomainError
)


def _random_tridiagonal(size: int, seed: int) -> SymTridiag:
    rng = np.random.default_rng(seed)
    return SymTridiag.from_sequences(rng.normal(size=size), rng.normal(size=size - 1))


def _random_symmetric(size: int, seed: int) -> np.ndarray:
    matrix = np.random.default_rng(seed).normal(size=(size, size))
    return matrix + matrix.T


class TestSymTridiag:
    def test_should_reject_shape_mismatch(self):
        with pytest.raises(ParameterDomainError):
            SymTridiag.from_sequences([1.0, 2.0], [0.5, 0.5])

    def test_should_reject_non_finite_entries(self):
        with pytest.raises(ParameterDomainError):
            SymTridiag.from_sequences([1.0, math.nan], [0.5])

    def test_should_embed_into_dense_matrix(self):
        dense = SymTridiag.from_sequences([1.0, 2.0, 3.0], [4.0, 5.0]).to_dense()
        np.testing.assert_array_equal(dense, [[1, 4, 0], [4, 2, 5], [0, 5, 3]])


class TestEigTridiag:
    def test_should_sort_diagonal_matrix(self):
        result = eig_tridiag(SymTridiag.from_sequences([3.0, 1.0, 2.0], [0.0, 0.0]))
        assert list(result.values) == [1.0, 2.0, 3.0]

    def test_should_solve_two_by_two_case(self):
        result = eig_tridiag(SymTridiag.from_sequences([0.0, 0.0], [1.0]))
        assert list(result.values) == pytest.approx([-1.0, 1.0], abs=1e-15)

    def test_should_return_gauss_legendre_nodes(self):
        result = eig_tridiag(SymTridiag.from_sequences([0.0, 0.0], [1 / math.sqrt(3)]))
        assert list(result.values) == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)])

    def test_should_match_library_eigenvalues(self):
        matrix = _random_tridiagonal(40, seed=1)
        result = eig_tridiag(matrix)
        np.testing.assert_allclose(
            result.values, np.linalg.eigvalsh(matrix.to_dense()), atol=1e-12
        )

    def test_should_return_orthonormal_vectors_with_small_residual(self):
        matrix = _random_tridiagonal(12, seed=2)
        result = eig_tridiag(matrix, want_vectors=True)
        assert result.vectors is not None
        np.testing.assert_allclose(result.vectors.T @ result.vectors, np.eye(12), atol=1e-10)
        assert result.residual < 1e-10

    def test_should_fix_sign_of_largest_component(self):
        result = eig_tridiag(_random_tridiagonal(8, seed=3), want_vectors=True)
        assert result.vectors is not None
        for column in result.vectors.T:
            assert column[np.argmax(np.abs(column))] > 0

    def test_should_be_deterministic(self):
        matrix = _random_tridiagonal(15, seed=4)
        first = eig_tridiag(matrix, want_vectors=True)
        second = eig_tridiag(matrix, want_vectors=True)
        np.testing.assert_array_equal(first.values, second.values)
        np.testing.assert_array_equal(first.vectors, second.vectors)

    def test_should_omit_vectors_unless_requested(self):
        assert eig_tridiag(_random_tridiagonal(4, seed=5)).vectors is None

    def test_should_preserve_trace(self):
        matrix = _random_tridiagonal(20, seed=6)
        values = eig_tridiag(matrix).values
        assert np.sum(values) == pytest.approx(np.sum(matrix.d), rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize('seed', range(5))
    def test_should_interlace_leading_submatrix(self, seed: int):
        matrix = _random_tridiagonal(12, seed=10 + seed)
        full = eig_tridiag(matrix).values
        leading = eig_tridiag(matrix.leading(11)).values
        assert np.all(full[:-1] <= leading + 1e-12)
        assert np.all(leading <= full[1:] + 1e-12)

    def test_should_raise_convergence_error_without_sweeps(self):
        with pytest.raises(ConvergenceError):
            eig_tridiag(_random_tridiagonal(6, seed=7), sweeps_per_eigenvalue=0)


class TestEigDense:
    def test_should_return_ones_for_identity(self):
        assert list(eig_dense(np.eye(3)).values) == pytest.approx([1, 1, 1])

    def test_should_reproduce_tridiagonal_route(self):
        matrix = _random_tridiagonal(10, seed=8)
        np.testing.assert_allclose(
            eig_dense(matrix.to_dense()).values, eig_tridiag(matrix).values, atol=1e-12
        )

    def test_should_return_single_unit_eigenvalue_for_rank_one_projector(self):
        vector = np.random.default_rng(9).normal(size=6)
        vector /= np.linalg.norm(vector)
        values = eig_dense(np.outer(vector, vector)).values
        np.testing.assert_allclose(values, [0, 0, 0, 0, 0, 1], atol=1e-12)

    def test_should_return_eigenvectors_of_dense_matrix(self):
        matrix = _random_symmetric(9, seed=10)
        result = eig_dense(matrix, want_vectors=True)
        assert result.vectors is not None
        np.testing.assert_allclose(
            matrix @ result.vectors, result.vectors * result.values, atol=1e-10
        )
        np.testing.assert_allclose(result.values, np.linalg.eigvalsh(matrix), atol=1e-11)

    def test_should_tridiagonalize_by_orthogonal_transform(self):
        matrix = _random_symmetric(7, seed=11)
        tridiagonal, transform = householder_tridiagonalize(matrix)
        np.testing.assert_allclose(
            transform.T @ matrix @ transform, tridiagonal.to_dense(), atol=1e-12
        )

    def test_should_raise_asymmetry_error(self):
        with pytest.raises(AsymmetryError):
            eig_dense(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestEigGeneralized:
    def test_should_reduce_to_standard_problem_for_identity_metric(self):
        matrix = _random_symmetric(6, seed=12)
        np.testing.assert_allclose(
            eig_generalized(matrix, np.eye(6)).values, eig_dense(matrix).values, atol=1e-12
        )

    def test_should_return_two_for_proportional_matrices(self):
        metric = np.array([[2.0, 0.5], [0.5, 1.0]])
        assert list(eig_generalized(2 * metric, metric).values) == pytest.approx([2, 2])

    def test_should_solve_two_by_two_hand_case(self):
        values = eig_generalized(np.diag([2.0, 8.0]), np.diag([1.0, 4.0])).values
        assert list(values) == pytest.approx([2, 2])

    def test_should_return_metric_orthonormal_vectors(self):
        matrix = _random_symmetric(5, seed=13)
        factor = np.random.default_rng(14).normal(size=(5, 5))
        metric = factor @ factor.T + 5 * np.eye(5)
        result = eig_generalized(matrix, metric, want_vectors=True)
        assert result.vectors is not None
        np.testing.assert_allclose(result.vectors.T @ metric @ result.vectors, np.eye(5),
                                   atol=1e-10)
        assert result.residual < 1e-10

    def test_should_name_failing_pivot(self):
        with pytest.raises(NotPositiveDefiniteError) as exc_info:
            eig_generalized(np.eye(3), np.diag([1.0, 2.0, -1.0]))
        assert exc_info.value.pivot_index == 2


class TestDetScan:
    def test_should_find_roots_of_diagonal_family(self):
        roots = det_scan(
            lambda energy: SymTridiag.from_sequences([1 - energy, 4 - energy], [0.0]),
            0.0, 5.0, 101
        )
        assert roots == pytest.approx([1.0, 4.0], abs=1e-9)

    def test_should_return_empty_list_without_roots(self):
        roots = det_scan(
            lambda energy: SymTridiag.from_sequences([1 - energy, 4 - energy], [0.0]),
            1.5, 3.5, 50
        )
        assert not roots

    def test_should_match_eigenvalues(self):
        matrix = _random_tridiagonal(8, seed=15)
        roots = det_scan(lambda energy: matrix.shifted(-energy), -10, 10, 40001)
        np.testing.assert_allclose(roots, eig_tridiag(matrix).values, atol=1e-9)

    def test_should_compute_determinant_sign(self):
        assert determinant_sign(SymTridiag.from_sequences([1.0, -2.0], [0.0])) == -1
        assert determinant_sign(SymTridiag.from_sequences([0.0, 0.0], [1.0])) == -1

    def test_should_reject_empty_window(self):
        with pytest.raises(ParameterDomainError):
            det_scan(lambda energy: SymTridiag.from_sequences([energy], []), 1.0, 1.0, 10)
