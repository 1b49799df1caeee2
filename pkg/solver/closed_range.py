import logging
from dataclasses import dataclass, field
import numpy as np
from scipy import linalg as sla
# Import custom modules
from utils import InvalidInputError
from linalg.matrix import as_mat, range_inclusion, RANK_RTOL
from linalg.reduction import reduce_pencil, split_blocks
from descriptor.system import DescriptorSystem

logger = logging.getLogger(__name__)

# Values of ||Q(eps) C2'||_mod above this count as unbounded
M_CAP = 1e6
# Relative rise tolerated between consecutive samples of a flat tail
FLAT_RTOL = 1e-3
# Number of trailing samples the numeric verdict looks at
TAIL = 4
DEFAULT_EPS_GRID = tuple(10 ** (-j / 2) for j in range(13))

@dataclass
class RangeVerdict:
    r: int
    sup_estimate: float
    bounded: bool
    algebraic_bounded: bool
    eps_samples: list = field(default_factory=list)
    growth_exponent: float = 0.0

    def summary(self) -> dict:
        return {
            'r': int(self.r),
            'sup_estimate': float(self.sup_estimate),
            'bounded': bool(self.bounded),
            'algebraic_bounded': bool(self.algebraic_bounded),
            'eps_samples': [[float(e), float(v)] for e, v in self.eps_samples],
            'growth_exponent': float(self.growth_exponent),
        }

def _block(B, name: str) -> np.ndarray:
    arr = np.array(B, dtype=float)
    if arr.ndim < 2:
        arr = as_mat(arr, name)
    if arr.ndim != 2:
        raise InvalidInputError(f'{name} must be 2-D, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f'{name} has non-finite entries')
    return arr

def _check_blocks(C_blocks, r):
    if len(C_blocks) != 4:
        raise InvalidInputError(f'Expected four blocks (C1, C2, C3, C4), got {len(C_blocks)}')
    C1, C2, C3, C4 = (_block(B, f'C{i + 1}') for i, B in enumerate(C_blocks))
    r = C1.shape[0] if r is None else r
    p, q = C2.shape[1], C3.shape[0]
    expected = {'C1': (r, r), 'C2': (r, p), 'C3': (q, r), 'C4': (q, p)}
    for name, B in zip(expected, (C1, C2, C3, C4)):
        if B.shape != expected[name]:
            raise InvalidInputError(f'{name} has shape {B.shape}, expected {expected[name]} for r={r}')
    return C1, C2, C3, C4, r

def _growth_exponent(eps: np.ndarray, values: np.ndarray) -> float:
    if np.any(values <= 0):
        return 0.0
    slope = np.polyfit(np.log(1.0 / eps), np.log(values), 1)[0]
    return float(slope)

def closed_range_criterion(C_blocks, eps_grid=None, m_cap: float = M_CAP, flat_rtol: float = FLAT_RTOL,
                           r: int = None, rtol: float = RANK_RTOL) -> RangeVerdict:
    """
    Boundedness of eps -> ||Q(eps) C2'||_mod, Q(eps) = (eps^2 E + C4'C4)^-1,
    for C split conformally with F = diag(E_r, 0).

    Q depends on eps^2 only, so the sup over (-1, 1) is sampled on eps > 0.
    The numeric branch calls the map bounded when its last samples stop
    rising and stay below m_cap; the algebraic branch asks whether
    range(C2') lies in range(C4'C4).
    """
    C1, C2, C3, C4, r = _check_blocks(C_blocks, r)
    eps = np.array(DEFAULT_EPS_GRID if eps_grid is None else eps_grid, dtype=float)
    if eps.ndim != 1 or eps.shape[0] < TAIL:
        raise InvalidInputError(f'eps_grid needs at least {TAIL} samples')
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise InvalidInputError('eps_grid must be positive and strictly decreasing')

    # Entries at rounding level of the reduction count as zero
    scale = max([np.abs(B).max() for B in (C1, C2, C3, C4) if B.size] + [1.0])
    C2 = np.where(np.abs(C2) <= rtol * scale, 0.0, C2)
    C4 = np.where(np.abs(C4) <= rtol * scale, 0.0, C4)

    p = C2.shape[1]
    if p == 0 or r == 0:
        # No C2 block: Q(eps) C2' is an empty matrix
        samples = [(float(e), 0.0) for e in eps]
        return RangeVerdict(r=r, sup_estimate=0.0, bounded=True, algebraic_bounded=True,
                            eps_samples=samples, growth_exponent=0.0)

    G = C4.T @ C4 if C4.shape[0] else np.zeros((p, p))
    w, V = sla.eigh(G)
    w = np.clip(w, 0.0, None)
    B = V.T @ C2.T
    values = np.array([np.abs(V @ (B / (e ** 2 + w)[:, None])).sum() for e in eps])

    tail = values[-TAIL:]
    flat = np.all(tail[1:] <= tail[:-1] * (1 + flat_rtol))
    bounded = bool(flat and tail.max() < m_cap)
    algebraic = range_inclusion(C2.T, G, rtol=rtol)
    if bounded != algebraic:
        logger.warning(f'Numeric ({bounded}) and algebraic ({algebraic}) closed-range verdicts disagree')

    return RangeVerdict(r=r,
                        sup_estimate=float(values.max()) if bounded else float('inf'),
                        bounded=bounded,
                        algebraic_bounded=algebraic,
                        eps_samples=list(zip(eps.tolist(), values.tolist())),
                        growth_exponent=_growth_exponent(eps[-TAIL:], tail))

def closed_range_for_system(system: DescriptorSystem, eps_grid=None, m_cap: float = M_CAP,
                            flat_rtol: float = FLAT_RTOL, rtol: float = RANK_RTOL) -> RangeVerdict:
    """
    Reduce F to diag(E_r, 0) with (L F R, L C R) and apply the closed-range
    criterion to the blocks of L C R. Only constant C is accepted.
    """
    if not system.is_constant:
        raise InvalidInputError('The closed-range criterion is stated for constant C; got a time-varying C(t)')
    F1, C0, L, R, r = reduce_pencil(system.F, system.C_values[0], rtol=rtol)
    return closed_range_criterion(split_blocks(C0, r), eps_grid=eps_grid, m_cap=m_cap,
                                  flat_rtol=flat_rtol, r=r, rtol=rtol)
