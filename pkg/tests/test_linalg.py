import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
# Import custom modules
from utils import InvalidInputError
from linalg.matrix import as_mat, mod_norm, pinv, orth_projector, matrix_rank, range_inclusion
from linalg.reduction import (canonical_form, canonical_reduction, verify_reduction, pencil_regular, split_blocks,
                              reduce_pencil)
from descriptor.catalog import EXAMPLE1_F, EXAMPLE1_C, EXAMPLE2_F, EXAMPLE2_C, EXAMPLE2_L, EXAMPLE2_R

def _low_rank(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))

class TestMatrixHelpers:
    def test_as_mat_shapes(self):
        assert as_mat(3.0).shape == (1, 1)
        assert as_mat([1.0, 2.0]).shape == (2, 1)
        assert as_mat([[1.0, 2.0]]).shape == (1, 2)

    @pytest.mark.parametrize('bad', [np.zeros((2, 2, 2)), np.zeros((0, 3)), [[1.0, np.nan]], [[np.inf]],
                                     [[1.0, 0.0], [0.0]], [['a', 1.0]], None])
    def test_as_mat_rejects(self, bad):
        with pytest.raises(InvalidInputError):
            as_mat(bad)

    @pytest.mark.parametrize('A, expected', [
        (np.zeros((2, 2)), 0.0),
        ([[1.0, 0.0], [0.0, 0.0]], 1.0),
        (EXAMPLE2_F, 16.0),
    ])
    def test_mod_norm(self, A, expected):
        assert mod_norm(A) == expected

    def test_mod_norm_is_a_norm(self, rng):
        for _ in range(20):
            A, B = rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
            alpha = rng.uniform(-5.0, 5.0)
            assert mod_norm(A + B) <= mod_norm(A) + mod_norm(B) + 1e-12
            assert mod_norm(alpha * A) == pytest.approx(abs(alpha) * mod_norm(A), rel=1e-12)

    def test_matrix_rank(self, rng):
        assert matrix_rank(np.zeros((3, 2))) == 0
        assert matrix_rank(EXAMPLE2_F) == 1
        assert matrix_rank(_low_rank(rng, 4, 3, 2)) == 2

class TestPseudoinverse:
    def test_identity(self):
        assert_allclose(pinv(np.eye(3)), np.eye(3), atol=1e-15)

    def test_projector_is_own_pseudoinverse(self):
        D = np.diag([1.0, 0.0])
        assert_allclose(pinv(D), D, atol=1e-15)

    def test_zero_matrix(self):
        assert_array_equal(pinv(np.zeros((2, 3))), np.zeros((3, 2)))

    @pytest.mark.parametrize('m, n, r', [(3, 2, 2), (4, 3, 2), (2, 5, 1), (3, 3, 3)])
    def test_penrose_conditions(self, rng, m, n, r):
        A = _low_rank(rng, m, n, r)
        X = pinv(A)
        scale = np.linalg.norm(A) * np.linalg.norm(X)
        assert_allclose(A @ X @ A, A, atol=1e-10 * scale)
        assert_allclose(X @ A @ X, X, atol=1e-10 * scale * np.linalg.norm(X))
        assert_allclose((A @ X).T, A @ X, atol=1e-10 * scale)
        assert_allclose((X @ A).T, X @ A, atol=1e-10 * scale)

    def test_matches_numpy_oracle(self, rng):
        A = _low_rank(rng, 5, 4, 3)
        assert_allclose(pinv(A), np.linalg.pinv(A), atol=1e-10)

class TestProjector:
    def test_zero(self):
        assert_array_equal(orth_projector(np.zeros((2, 2))), np.zeros((2, 2)))

    def test_diagonal(self):
        D = np.diag([1.0, 0.0])
        assert_allclose(orth_projector(D.T), D, atol=1e-15)

    def test_example2_transpose(self):
        P = orth_projector(EXAMPLE2_F.T)
        assert matrix_rank(P) == 1
        assert_allclose(P @ P, P, atol=1e-12)
        assert_allclose(P, P.T, atol=0)
        # P projects onto range(F)
        assert_allclose(P @ EXAMPLE2_F, EXAMPLE2_F, atol=1e-12)

class TestRangeInclusion:
    def test_zero_is_included(self, rng):
        assert range_inclusion(np.zeros((3, 2)), rng.standard_normal((3, 1)))

    def test_nonzero_not_in_zero_space(self):
        assert not range_inclusion([[1.0]], [[0.0]])

    def test_constructed_inclusion(self, rng):
        B = _low_rank(rng, 5, 4, 2)
        A = B @ rng.standard_normal((4, 3))
        assert range_inclusion(A, B)

    def test_orthogonal_column_excluded(self, rng):
        B = _low_rank(rng, 4, 4, 2)
        U, _, _ = np.linalg.svd(B)
        assert not range_inclusion(U[:, 3:], B)

    def test_row_mismatch(self):
        with pytest.raises(InvalidInputError):
            range_inclusion(np.ones((2, 1)), np.ones((3, 1)))

class TestCanonicalReduction:
    def test_already_canonical(self):
        F = np.diag([1.0, 0.0])
        L, R, r = canonical_reduction(F)
        assert r == 1
        assert verify_reduction(F, L, R, r)

    def test_example2(self):
        L, R, r = canonical_reduction(EXAMPLE2_F)
        assert r == 1
        assert_allclose(L @ EXAMPLE2_F @ R, canonical_form(2, 2, 1), atol=1e-12)
        assert verify_reduction(EXAMPLE2_F, L, R, r)

    def test_printed_pair_passes(self):
        assert verify_reduction(EXAMPLE2_F, EXAMPLE2_L, EXAMPLE2_R, 1)
        assert mod_norm(EXAMPLE2_L @ EXAMPLE2_F @ EXAMPLE2_R - canonical_form(2, 2, 1)) <= 1e-9

    @pytest.mark.parametrize('m, n, r', [(4, 3, 2), (3, 4, 2), (2, 2, 0), (5, 5, 5), (1, 3, 1)])
    def test_random_rectangular(self, rng, m, n, r):
        F = _low_rank(rng, m, n, r) if r else np.zeros((m, n))
        L, R, rank = canonical_reduction(F)
        assert rank == r
        assert verify_reduction(F, L, R, rank)

    def test_wrong_pair_rejected(self):
        assert not verify_reduction(EXAMPLE2_F, np.eye(2), np.eye(2), 1)

    def test_singular_pair_rejected(self):
        # L F R matches but L is singular
        F = np.diag([1.0, 0.0])
        L = np.diag([1.0, 0.0])
        assert not verify_reduction(F, L, np.eye(2), 1)

    def test_pair_shape_checked(self):
        with pytest.raises(InvalidInputError):
            verify_reduction(EXAMPLE2_F, np.eye(3), np.eye(2), 1)

class TestPencil:
    def test_identity_pencil(self):
        assert pencil_regular(np.eye(3), np.eye(3))

    def test_example2_reduced_is_singular(self):
        assert not pencil_regular(np.diag([1.0, 0.0]), [[0.0, 0.0], [1.0, 0.0]])

    def test_example1_is_regular(self):
        assert pencil_regular(EXAMPLE1_F, EXAMPLE1_C)

    def test_equivalent_pencils_agree(self, rng):
        for trial in range(30):
            n = int(rng.integers(2, 5))
            F, C = rng.standard_normal((n, n)), rng.standard_normal((n, n))
            if trial % 2:
                # Shared kernel vector v: det(lambda F + C) vanishes for every lambda
                v = rng.standard_normal(n)
                K = np.eye(n) - np.outer(v, v) / (v @ v)
                F, C = F @ K, C @ K
            L = np.eye(n) + 0.25 * rng.uniform(-1.0, 1.0, size=(n, n)) / n
            R = np.eye(n) + 0.25 * rng.uniform(-1.0, 1.0, size=(n, n)) / n
            assert pencil_regular(F, C) == pencil_regular(L @ F @ R, L @ C @ R)
            assert pencil_regular(F, C) == (trial % 2 == 0)

    @pytest.mark.parametrize('F, C', [(np.ones((2, 3)), np.ones((2, 3))), (np.eye(2), np.eye(3))])
    def test_shape_errors(self, F, C):
        with pytest.raises(InvalidInputError):
            pencil_regular(F, C)

class TestBlocks:
    def test_split_shapes(self):
        C = np.arange(12.0).reshape(3, 4)
        C1, C2, C3, C4 = split_blocks(C, 2)
        assert (C1.shape, C2.shape, C3.shape, C4.shape) == ((2, 2), (2, 2), (1, 2), (1, 2))
        assert_array_equal(np.block([[C1, C2], [C3, C4]]), C)

    def test_full_rank_gives_empty_blocks(self):
        C1, C2, C3, C4 = split_blocks(np.eye(2), 2)
        assert C2.shape == (2, 0) and C3.shape == (0, 2) and C4.shape == (0, 0)

    def test_bad_rank(self):
        with pytest.raises(InvalidInputError):
            split_blocks(np.eye(2), 3)

    def test_reduce_pencil_example2(self):
        F1, C0, L, R, r = reduce_pencil(EXAMPLE2_F, EXAMPLE2_C)
        assert r == 1
        assert_allclose(F1, canonical_form(2, 2, 1))
        assert_allclose(C0, L @ EXAMPLE2_C @ R)
        assert not pencil_regular(F1, C0)

    def test_printed_pair_reduced_coefficient(self):
        # Direct product with the printed pair; the printed C0 differs
        assert_allclose(EXAMPLE2_L @ EXAMPLE2_C @ EXAMPLE2_R, [[0.0, 0.0], [1.0, 0.0]], atol=1e-14)
