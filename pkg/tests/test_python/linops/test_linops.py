import numpy as np
import pytest

from accelmirror import DenseMatrix, dual, norm, pairing, primal
from accelmirror._common import ConvergenceError, DimensionError, DomainError, dual_norm
from accelmirror._random import SeededStream
from accelmirror.linops import (
    matvec,
    max_abs_entry,
    max_abs_row_sum,
    spectral_radius,
)
from tests.test_python.conftest import random_simplex_point


def test_pairing_examples(stream):
    assert pairing([1.0, 2.0], [3.0, 4.0]) == 11.0
    x = random_simplex_point(stream, 4)
    assert pairing(np.zeros(4), x) == 0.0
    assert pairing(np.ones(4), x) == pytest.approx(1.0, abs=1e-15)


def test_pairing_rejects_mismatched_lengths():
    with pytest.raises(DimensionError):
        pairing([1.0, 2.0], [1.0, 2.0, 3.0])


@pytest.mark.parametrize(("kind", "expected"), [("l2", 5.0), ("l1", 7.0), ("linf", 4.0)])
def test_norm_of_three_minus_four(kind, expected):
    assert norm([3.0, -4.0], kind) == pytest.approx(expected)


def test_norm_unknown_kind_and_empty_vector():
    with pytest.raises(ValueError):
        norm([1.0], "l3")
    assert norm([], "l1") == 0.0


def test_primal_and_dual_vectors_are_read_only_float_arrays():
    x = primal([1, 2])
    z = dual((0.5, -0.5))
    assert x.dtype == np.float64
    assert z.dtype == np.float64
    with pytest.raises(ValueError):
        x[0] = 3.0


def test_vector_constructors_validate_shape_and_finiteness():
    with pytest.raises(DimensionError):
        primal([[1.0, 2.0]])
    with pytest.raises(DomainError):
        dual([1.0, float("nan")])
    with pytest.raises(DomainError):
        primal([float("inf")])


def test_dense_matrix_flat_and_nested_construction_agree():
    nested = DenseMatrix([[2.0, 1.0], [1.0, 2.0]])
    flat = DenseMatrix([2.0, 1.0, 1.0, 2.0], rows=2, cols=2)
    assert nested == flat
    assert nested.shape == (2, 2)
    np.testing.assert_array_equal(flat.entries, [2.0, 1.0, 1.0, 2.0])
    assert DenseMatrix.identity(3) == DenseMatrix(np.eye(3))
    assert DenseMatrix.zeros(2, 3).shape == (2, 3)


def test_dense_matrix_rejects_bad_input():
    with pytest.raises(DimensionError):
        DenseMatrix([1.0, 2.0, 3.0], rows=2, cols=2)
    with pytest.raises(DimensionError):
        DenseMatrix([1.0, 2.0], rows=2)
    with pytest.raises(DimensionError):
        DenseMatrix([1.0, 2.0])
    with pytest.raises(DomainError):
        DenseMatrix([[1.0, float("nan")], [0.0, 1.0]])


def test_dense_matrix_gram_and_symmetry():
    B = DenseMatrix([[1.0, 2.0], [3.0, 4.0]])
    G = B.gram()
    np.testing.assert_allclose(G.array, [[10.0, 14.0], [14.0, 20.0]])
    assert G.is_symmetric()
    assert not B.is_symmetric()
    assert not DenseMatrix.zeros(2, 3).is_symmetric()
    assert B.transpose().array[0, 1] == 3.0


def test_matvec_examples():
    np.testing.assert_array_equal(matvec(DenseMatrix.identity(2), [1.0, 2.0]), [1.0, 2.0])
    M = DenseMatrix([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_array_equal(matvec(M, [1.0, 0.0]), [2.0, 1.0])
    with pytest.raises(DimensionError):
        matvec(M, [1.0, 2.0, 3.0])


@pytest.mark.parametrize(
    ("entries", "expected"),
    [
        ([[2.0, 0.0], [0.0, 1.0]], 2.0),
        ([[2.0, 1.0], [1.0, 2.0]], 3.0),
        (np.eye(3), 1.0),
    ],
)
def test_spectral_radius_examples(entries, expected):
    assert spectral_radius(DenseMatrix(entries)) == pytest.approx(expected, rel=1e-8)


def test_spectral_radius_matches_numpy_on_gram_matrices(stream):
    for _ in range(5):
        B = DenseMatrix(stream.normal(36), rows=6, cols=6)
        G = B.gram()
        expected = float(np.max(np.abs(np.linalg.eigvalsh(G.array))))
        assert spectral_radius(G) == pytest.approx(expected, rel=1e-7)
        assert max_abs_row_sum(G) >= expected * (1.0 - 1e-12)


def test_spectral_radius_rejects_non_square_and_asymmetric():
    with pytest.raises(DimensionError):
        spectral_radius(DenseMatrix.zeros(2, 3))
    with pytest.raises(DomainError):
        spectral_radius(DenseMatrix([[1.0, 2.0], [0.0, 1.0]]))
    assert spectral_radius(DenseMatrix.zeros(3, 3)) == 0.0


def test_spectral_radius_reports_exhausted_budget():
    M = DenseMatrix([[1.0, 0.0], [0.0, 0.999]])
    with pytest.raises(ConvergenceError):
        spectral_radius(M, tol=1e-300, max_iters=3)


def test_max_abs_entry():
    assert max_abs_entry(DenseMatrix([[2.0, -5.0], [1.0, 0.0]])) == 5.0
    with pytest.raises(DomainError):
        max_abs_entry(DenseMatrix([]))


def test_l2_norm_is_bounded_by_l1_times_linf():
    stream = SeededStream(31)
    for i in range(500):
        v = (1.0 + i % 7) * stream.normal(1 + i % 9)
        assert norm(v, "l2") ** 2 <= norm(v, "l1") * norm(v, "linf") * (1.0 + 1e-12)


@pytest.mark.parametrize("kind", ["l1", "l2", "linf"])
def test_pairing_is_bounded_by_the_dual_norm(kind):
    stream = SeededStream(32)
    for _ in range(500):
        zeta, x = dual(stream.normal(6)), primal(stream.normal(6))
        bound = norm(zeta, dual_norm(kind)) * norm(x, kind)
        assert abs(pairing(zeta, x)) <= bound * (1.0 + 1e-12)
