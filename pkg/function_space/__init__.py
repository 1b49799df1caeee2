from .grid import Grid, GridFn, l2_inner, l2_norm, sup_distance, diff, cumulative_integral
from .cantor import cantor, cantor_fn, bernstein
