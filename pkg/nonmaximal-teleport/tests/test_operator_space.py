"""
Tests for the Hilbert-Schmidt space utilities.
"""
import numpy as np
import pytest

from exceptions import (
    DimensionMismatchError,
    InvalidDimensionError,
    MalformedBasisError,
    NonHermitianError,
    NonOrthonormalBasisError,
)
from models import OperatorBasis
from operator_space import (
    apply_expansion,
    canonical_form,
    complete_basis,
    decompose_map,
    devec_left,
    devec_right,
    hs_inner,
    is_hermiticity_preserving,
    is_orthonormal_basis,
    map_images,
    matrix_units,
    partial_trace,
    random_onb,
    sandwich,
    sandwich_images,
    superop_inner,
    superop_left,
    superop_right,
    vec_left,
    vec_right,
)
from qubit_examples import spin_basis


def random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_matrix_units_are_orthonormal(n):
    units = matrix_units(n)
    assert len(units) == n * n
    assert is_orthonormal_basis(units)


def test_matrix_units_are_row_major():
    units = matrix_units(2).elements
    np.testing.assert_array_equal(units[1], [[0, 1], [0, 0]])
    np.testing.assert_array_equal(units[2], [[0, 0], [1, 0]])


@pytest.mark.parametrize("n", [0, -1, 2.5])
def test_matrix_units_rejects_bad_dimension(n):
    with pytest.raises(InvalidDimensionError):
        matrix_units(n)


def test_hs_inner_is_conjugate_linear_in_first_argument(rng):
    A, B = random_matrix(rng, 3), random_matrix(rng, 3)
    np.testing.assert_allclose(hs_inner(2j * A, B), -2j * hs_inner(A, B), atol=1e-12)
    np.testing.assert_allclose(hs_inner(A, B), np.trace(A.conj().T @ B), atol=1e-12)


def test_hs_inner_rejects_mismatched_dimensions():
    with pytest.raises(DimensionMismatchError):
        hs_inner(np.eye(2), np.eye(3))


@pytest.mark.parametrize("vec", [vec_left, vec_right])
def test_vectorization_is_an_isometry(rng, vec):
    for _ in range(10):
        A, B = random_matrix(rng, 3), random_matrix(rng, 3)
        assert abs(hs_inner(A, B) - np.vdot(vec(A), vec(B))) <= 1e-12


def test_vec_left_of_diagonal_operator():
    v = vec_left(np.diag([0.5, 0.8]))
    np.testing.assert_allclose(v, [0.5, 0, 0, 0.8])


def test_vec_right_of_identity_is_unnormalized_bell_vector():
    np.testing.assert_allclose(vec_right(np.eye(2)), [1, 0, 0, 1])


def test_vec_left_and_vec_right_place_operator_on_opposite_legs(rng):
    A = random_matrix(rng, 2)
    bell = vec_left(np.eye(2))
    np.testing.assert_allclose(vec_left(A), np.kron(A, np.eye(2)) @ bell, atol=1e-12)
    np.testing.assert_allclose(vec_right(A), np.kron(np.eye(2), A) @ bell, atol=1e-12)


def test_devec_inverts_vec(rng):
    A = random_matrix(rng, 3)
    np.testing.assert_allclose(devec_left(vec_left(A)), A)
    np.testing.assert_allclose(devec_right(vec_right(A)), A)


def test_devec_rejects_non_square_length():
    with pytest.raises(DimensionMismatchError):
        devec_left(np.ones(5))


def test_orthonormality_check_rejects_wrong_count():
    b = OperatorBasis(elements=matrix_units(2).elements[:3])
    with pytest.raises(MalformedBasisError):
        is_orthonormal_basis(b)


def test_orthonormality_check_detects_scaled_element():
    elements = np.array(matrix_units(2).elements)
    elements[0] *= 2
    assert not is_orthonormal_basis(OperatorBasis(elements=elements))


@pytest.mark.parametrize("n,seed", [(1, 0), (2, 1), (3, 2), (4, 3)])
def test_random_onb_is_orthonormal(n, seed):
    assert random_onb(n, seed).orthonormality_defect() <= 1e-12


def test_random_onb_is_reproducible():
    np.testing.assert_array_equal(random_onb(2, 7).elements, random_onb(2, 7).elements)
    assert not np.allclose(random_onb(2, 7).elements, random_onb(2, 8).elements)


def test_complete_basis_starts_with_normalized_operator():
    f = np.array([[1.0, 2.0], [0.0, 1.0]])
    b = complete_basis(f)
    assert is_orthonormal_basis(b)
    np.testing.assert_allclose(b[0], f / np.linalg.norm(f), atol=1e-12)


def test_sandwich_images_match_definition(rng):
    fa, fb = random_matrix(rng, 2), random_matrix(rng, 2)
    images = sandwich_images(fa, fb)
    for img, e in zip(images, matrix_units(2).elements):
        np.testing.assert_allclose(img, fa @ e @ fb.conj().T, atol=1e-12)


def test_sandwich_maps_of_onb_are_orthonormal():
    b = spin_basis()
    maps = [sandwich_images(fa, fb) for fa in b.elements for fb in b.elements]
    gram = np.array([[superop_inner(p, q) for q in maps] for p in maps])
    np.testing.assert_allclose(gram, np.eye(16), atol=1e-12)


def test_superop_representations_of_identity_map():
    images = map_images(lambda e: e, 2)
    left = superop_left(images)
    assert left.shape == (4, 4)
    # sum_ij e_ij (x) e_ij is the unnormalized Bell projector
    np.testing.assert_allclose(superop_right(images), np.outer([1, 0, 0, 1], [1, 0, 0, 1]))
    np.testing.assert_allclose(left, superop_right(images))


def test_hermiticity_preserving(rng):
    K = random_matrix(rng, 2)
    assert is_hermiticity_preserving(map_images(lambda e: K @ e @ K.conj().T, 2))
    assert not is_hermiticity_preserving(map_images(lambda e: K @ e, 2))


def test_decomposition_reconstructs_map(rng):
    b = random_onb(3, 11)
    kraus = [random_matrix(rng, 3) for _ in range(3)]
    images = map_images(lambda e: sum(K @ e @ K.conj().T for K in kraus), 3)
    c = decompose_map(images, b)
    rebuilt = map_images(lambda e: apply_expansion(c, b, e), 3)
    np.testing.assert_allclose(rebuilt, images, atol=1e-10)


def test_decomposition_of_transpose_in_matrix_units():
    # A^T = sum_ij e_ij A e_ij, Hermiticity preserving but not CP
    images = map_images(lambda e: e.T, 2)
    c = decompose_map(images, matrix_units(2))
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[2 * i + j, 2 * j + i] = 1
    np.testing.assert_allclose(c, swap, atol=1e-12)
    np.testing.assert_allclose(c, c.conj().T, atol=1e-12)


def test_decomposition_of_single_sandwich_is_unit_coefficient():
    b = spin_basis()
    c = decompose_map(sandwich_images(b[1], b[2]), b)
    expected = np.zeros((4, 4))
    expected[1, 2] = 1
    np.testing.assert_allclose(c, expected, atol=1e-12)


def test_decomposition_requires_orthonormal_basis():
    elements = np.array(matrix_units(2).elements)
    elements[0] *= 2
    with pytest.raises(NonOrthonormalBasisError):
        decompose_map(map_images(lambda e: e, 2), OperatorBasis(elements=elements))


def test_canonical_form_diagonalizes_cp_map(rng):
    b = random_onb(2, 3)
    kraus = [random_matrix(rng, 2) for _ in range(2)]
    images = map_images(lambda e: sum(K @ e @ K.conj().T for K in kraus), 2)
    g, values = canonical_form(decompose_map(images, b), b)
    assert is_orthonormal_basis(g)
    assert values == sorted(values)
    assert min(values) >= -1e-10
    rebuilt = map_images(lambda e: sum(v * ga @ e @ ga.conj().T for v, ga in zip(values, g.elements)), 2)
    np.testing.assert_allclose(rebuilt, images, atol=1e-10)


def test_canonical_form_of_transpose_has_negative_eigenvalue():
    images = map_images(lambda e: e.T, 2)
    _, values = canonical_form(decompose_map(images, matrix_units(2)), matrix_units(2))
    np.testing.assert_allclose(values, [-1, 1, 1, 1], atol=1e-12)


def test_canonical_form_rejects_non_hermitian():
    c = np.zeros((4, 4))
    c[0, 1] = 1
    with pytest.raises(NonHermitianError):
        canonical_form(c, matrix_units(2))


def test_partial_trace_of_product_state(rng):
    A = random_matrix(rng, 2)
    B = random_matrix(rng, 3)
    C = random_matrix(rng, 2)
    joint = np.kron(np.kron(A, B), C)
    np.testing.assert_allclose(partial_trace(joint, [2, 3, 2], keep=[2]), np.trace(A) * np.trace(B) * C, atol=1e-10)
    np.testing.assert_allclose(partial_trace(joint, [2, 3, 2], keep=[0, 2]), np.trace(B) * np.kron(A, C), atol=1e-10)


def test_partial_trace_rejects_wrong_shape():
    with pytest.raises(DimensionMismatchError):
        partial_trace(np.eye(4), [2, 3], keep=[0])


def test_sandwich_rejects_mismatched_operands():
    with pytest.raises(DimensionMismatchError):
        sandwich(np.eye(2), np.eye(2), np.eye(3))
