from .matrix import as_mat, mod_norm, pinv, orth_projector, matrix_rank, range_inclusion
from .reduction import canonical_reduction, verify_reduction, pencil_regular, split_blocks, reduce_pencil
