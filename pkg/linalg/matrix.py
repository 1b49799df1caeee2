import numpy as np
from scipy import linalg as sla
# Import custom modules
from utils import InvalidInputError, float_array

# Relative cutoff on singular values for rank decisions
RANK_RTOL = 1e-10
# Slack on the Penrose conditions and projector identities
PINV_TOL = 1e-9

def as_mat(A, name: str = 'matrix') -> np.ndarray:
    """
    Coerce to a dense real 2-D array; vectors become columns, scalars become 1x1.
    """
    arr = float_array(A, name)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim > 2:
        raise InvalidInputError(f'{name} must be 2-D, got shape {arr.shape}')
    if arr.size == 0:
        raise InvalidInputError(f'{name} must have positive row and column counts, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f'{name} has non-finite entries')
    return arr

def mod_norm(A) -> float:
    return float(np.abs(as_mat(A)).sum())

def _svd(A: np.ndarray):
    return sla.svd(A, full_matrices=False, lapack_driver='gesvd')

def _rank_from_singular_values(s: np.ndarray, rtol: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))

def matrix_rank(A, rtol: float = RANK_RTOL) -> int:
    s = sla.svdvals(as_mat(A))
    return _rank_from_singular_values(s, rtol)

def pinv(A, rtol: float = RANK_RTOL) -> np.ndarray:
    """
    Moore-Penrose pseudoinverse from a truncated SVD.

    Singular values below rtol times the largest one are treated as zero,
    so A^+ = V_r diag(1/s_r) U_r'.
    """
    A = as_mat(A)
    U, s, Vt = _svd(A)
    r = _rank_from_singular_values(s, rtol)
    if r == 0:
        return np.zeros((A.shape[1], A.shape[0]))
    return (Vt[:r].T / s[:r]) @ U[:, :r].T

def orth_projector(A, rtol: float = RANK_RTOL) -> np.ndarray:
    """
    Orthogonal projector pinv(A) A onto the row space of A (= ker(A)^perp).

    For A = F' this is the projector onto range(F) used in the boundary terms.
    """
    A = as_mat(A)
    P = pinv(A, rtol=rtol) @ A
    # symmetric up to rounding; enforce it exactly
    return 0.5 * (P + P.T)

def range_inclusion(A, B, rtol: float = RANK_RTOL) -> bool:
    """
    True iff every column of A lies in the column space of B.

    Both ranks are decided with one absolute cutoff taken from the stacked
    matrix [B | A], so rank([B | A]) == rank(B) is a like-for-like comparison.
    """
    A = as_mat(A, 'A')
    B = as_mat(B, 'B')
    if A.shape[0] != B.shape[0]:
        raise InvalidInputError(f'Row counts differ: A has {A.shape[0]}, B has {B.shape[0]}')
    stacked = np.hstack([B, A])
    s_all = sla.svdvals(stacked)
    if s_all[0] == 0.0:
        return True
    cutoff = rtol * s_all[0]
    rank_all = int(np.count_nonzero(s_all > cutoff))
    rank_b = int(np.count_nonzero(sla.svdvals(B) > cutoff))
    return rank_all == rank_b
