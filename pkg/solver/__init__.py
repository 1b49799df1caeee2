from .regularized import RegSolution, ProbeReport, solve_regularized, classify_norms, pseudosolution_probe
from .riccati import riccati_rhs, riccati_bounds, riccati_sweep, example1_log_q, example1_closed_form
from .closed_range import RangeVerdict, closed_range_criterion, closed_range_for_system
