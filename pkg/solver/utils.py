import math
import numpy as np
from scipy import sparse
# Import custom modules
from function_space.grid import Grid

# Grid coupling N >= GRID_PER_EPS * (c - a) / eps for the stiff regularized system
GRID_PER_EPS = 20
GRID_MAX = 200000

def coupled_grid_size(grid: Grid, eps: float, grid_max: int = GRID_MAX, per_eps: float = GRID_PER_EPS):
    """
    Node count for a solve at eps: max(grid.N, ceil(per_eps (c - a) / eps)), capped.

    Returns:
        N (int)
        capped (bool): whether the cap bound
    """
    wanted = max(grid.N, math.ceil(per_eps * (grid.c - grid.a) / eps))
    if wanted > grid_max:
        return grid_max, True
    return wanted, False

class BlockAssembler:
    """
    Collects dense blocks into a sparse COO triplet list.

    add_blocks places K blocks of shape (p, q): block k lands at rows
    row0 + k*row_step and columns col0 + k*col_step.
    """
    def __init__(self, shape):
        self.shape = shape
        self.rows = list()
        self.cols = list()
        self.vals = list()

    def add_blocks(self, blocks: np.ndarray, row0: int, col0: int, row_step: int, col_step: int):
        if blocks.ndim == 2:
            blocks = blocks[None]
        K, p, q = blocks.shape
        if p == 0 or q == 0:
            return
        k = np.arange(K)[:, None, None]
        i = np.arange(p)[None, :, None]
        j = np.arange(q)[None, None, :]
        rows = np.broadcast_to(row0 + k * row_step + i, (K, p, q))
        cols = np.broadcast_to(col0 + k * col_step + j, (K, p, q))
        self.rows.append(rows.ravel())
        self.cols.append(cols.ravel())
        self.vals.append(blocks.ravel())

    def tocsc(self) -> sparse.csc_matrix:
        rows = np.concatenate(self.rows) if self.rows else np.zeros(0, dtype=int)
        cols = np.concatenate(self.cols) if self.cols else np.zeros(0, dtype=int)
        vals = np.concatenate(self.vals) if self.vals else np.zeros(0)
        keep = vals != 0.0
        return sparse.coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=self.shape).tocsc()

def range_kernel_bases(F: np.ndarray, rtol: float):
    """
    Orthonormal bases from the SVD F = U S V':
    U_r spans range(F), U_0 spans ker(F'), W_r spans range(F'), W_0 spans ker(F).
    """
    U, s, Vt = np.linalg.svd(F, full_matrices=True)
    r = int(np.count_nonzero(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    W = Vt.T
    return U[:, :r], U[:, r:], W[:, :r], W[:, r:], r
