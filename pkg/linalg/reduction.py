import numpy as np
from scipy import linalg as sla
# Import custom modules
from utils import InvalidInputError
from linalg.matrix import as_mat, mod_norm, RANK_RTOL

# Relative slack of the L F R = diag(E_r, 0) verification predicate
REDUCE_TOL = 1e-9
# det(lambda F + C) counts as zero below this fraction of the Hadamard bound
PENCIL_TOL = 1e-8

def canonical_form(m: int, n: int, r: int) -> np.ndarray:
    E = np.zeros((m, n))
    E[np.arange(r), np.arange(r)] = 1.0
    return E

def canonical_reduction(F, rtol: float = RANK_RTOL):
    """
    Gauss-Jordan elimination with complete pivoting on both sides of F.

    Row operations accumulate into L and column operations into R, so that
    L F R = diag(E_r, 0). The pair is one admissible choice, not a unique one.

    Returns:
        L (np.ndarray): invertible m x m
        R (np.ndarray): invertible n x n
        r (int): rank of F
    """
    F = as_mat(F, 'F')
    m, n = F.shape
    A = F.copy()
    L = np.eye(m)
    R = np.eye(n)

    scale = np.abs(F).max()
    tol = rtol * scale
    r = 0
    for k in range(min(m, n)):
        sub = np.abs(A[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol:
            break
        i, j = i + k, j + k

        # Pivot to (k, k)
        A[[k, i], :] = A[[i, k], :]
        L[[k, i], :] = L[[i, k], :]
        A[:, [k, j]] = A[:, [j, k]]
        R[:, [k, j]] = R[:, [j, k]]

        pivot = A[k, k]
        A[k, :] /= pivot
        L[k, :] /= pivot

        # Clear column k with row operations
        col = A[:, k].copy()
        col[k] = 0.0
        A -= np.outer(col, A[k, :])
        L -= np.outer(col, L[k, :])

        # Clear row k with column operations
        row = A[k, :].copy()
        row[k] = 0.0
        A -= np.outer(A[:, k], row)
        R -= np.outer(R[:, k], row)

        r += 1

    return L, R, r

def verify_reduction(F, L, R, r: int, tol: float = REDUCE_TOL) -> bool:
    """
    Verification predicate for a candidate pair: L, R invertible and
    ||L F R - diag(E_r, 0)||_mod within tol relative to the product scale.
    """
    F = as_mat(F, 'F')
    L = as_mat(L, 'L')
    R = as_mat(R, 'R')
    m, n = F.shape
    if L.shape != (m, m) or R.shape != (n, n):
        raise InvalidInputError(f'L must be {m}x{m} and R {n}x{n}, got {L.shape} and {R.shape}')

    scale = max(1.0, mod_norm(L) * mod_norm(F) * mod_norm(R))
    defect = mod_norm(L @ F @ R - canonical_form(m, n, r))
    if defect > tol * scale:
        return False
    return abs(sla.det(L)) > 0 and abs(sla.det(R)) > 0

def pencil_regular(F, C, tol: float = PENCIL_TOL) -> bool:
    """
    Whether lambda -> det(lambda F + C) is not identically zero.

    The determinant is a polynomial of degree <= n, so it vanishes
    identically iff it vanishes at the n+1 points lambda_k = k + 1.
    """
    F = as_mat(F, 'F')
    C = as_mat(C, 'C')
    if F.shape[0] != F.shape[1] or C.shape[0] != C.shape[1]:
        raise InvalidInputError(f'Pencil matrices must be square, got {F.shape} and {C.shape}')
    if F.shape != C.shape:
        raise InvalidInputError(f'Pencil matrices differ in size: {F.shape} and {C.shape}')

    n = F.shape[0]
    for k in range(n + 1):
        M = (k + 1) * F + C
        hadamard = np.prod(np.linalg.norm(M, axis=1))
        if hadamard == 0.0:
            continue
        if abs(sla.det(M)) > tol * hadamard:
            return True
    return False

def split_blocks(C, r: int):
    """
    Split C into (C1, C2, C3, C4) conforming to F = diag(E_r, 0).
    Blocks may be empty when r equals a dimension of C.
    """
    C = as_mat(C, 'C')
    m, n = C.shape
    if not 0 <= r <= min(m, n):
        raise InvalidInputError(f'Block size r={r} is incompatible with a {m}x{n} matrix')
    return C[:r, :r], C[:r, r:], C[r:, :r], C[r:, r:]

def reduce_pencil(F, C, rtol: float = RANK_RTOL):
    """
    Equivalent pencil (F1, C0) = (L F R, L C R) with F1 = diag(E_r, 0).
    """
    F = as_mat(F, 'F')
    C = as_mat(C, 'C')
    if F.shape != C.shape:
        raise InvalidInputError(f'F and C differ in shape: {F.shape} and {C.shape}')
    L, R, r = canonical_reduction(F, rtol=rtol)
    F1 = canonical_form(*F.shape, r)
    C0 = L @ C @ R
    return F1, C0, L, R, r
