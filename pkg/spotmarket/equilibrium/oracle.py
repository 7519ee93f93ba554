"""
Numeric oracles for the equilibrium closed forms

Everything here is built on utility comparisons and brute-force search only, never on the
closed-form expressions it is used to validate.

The price lattice is not fixed at 0.01: `oracle_grid_step` shrinks it with the condition number of
the revenue Hessian. On elongated revenue ridges the 0.01 lattice maximizer can sit more than 0.02
from the peak in a coordinate (q_o=458.4, q_s=26.2 lands at (268.52, 8.35) against (268.494, 8.346)),
so a fixed step would fail the price tolerance on a few percent of draws. `revenue_grid_step` shrinks
it further where the revenue peak is sharp relative to its height.
"""
import math
from typing import List, Tuple
import numpy as np

from spotmarket.constants import (
    BISECTION_ITERATIONS, DRAW_QO_RANGE, ORACLE_GRID_STEP, ORACLE_MAX_GRID_POINTS,
    ORACLE_PRICE_TOLERANCE, ORACLE_REVENUE_RTOL, REVENUE_INTEGRATION_GRID, UTILITY_INTEGRATION_GRID
)
from spotmarket.market.selection import revenue, revenue_surface, selection_thresholds
from spotmarket.market.types import MarketParams, PriceVector, ServiceChoice
from spotmarket.util import InvalidParameterError, setup_logger
from .closed_form import c1_violation, revenue_hessian

logger = setup_logger(__name__)

# argmax order: ties resolve toward the lower-QoS service
CHOICE_ORDER = [ServiceChoice.NONE, ServiceChoice.SPOT, ServiceChoice.ON_DEMAND]

# window moves per refinement level before accepting the lattice maximizer
MAX_RECENTER = 1000


# #####################################
# Grid search over prices

def _lattice_size(upper: float, step: float) -> int:
    return int(math.floor(upper / step + 1e-9))


def _argmax_on(params: MarketParams, i_o: np.ndarray, i_s: np.ndarray, step: float) -> Tuple[int, int]:
    surface = revenue_surface(params, (i_o * step)[:, None], (i_s * step)[None, :])
    k = int(np.argmax(surface))
    a, b = np.unravel_index(k, surface.shape)
    return int(i_o[a]), int(i_s[b])


def numeric_revenue_argmax(params: MarketParams, grid_step: float = ORACLE_GRID_STEP) -> PriceVector:
    """
    Revenue-maximizing lattice point of spacing grid_step over [0, q_o] x [0, q_s]

    Lattices too large for one pass are searched coarse-to-fine: the maximizer of a lattice ten
    times coarser is refined within a window that follows the revenue ridge
    dp_o / dp_s = eta / (2 gamma_o).
    Ties go to the lexicographically smallest (p_o, p_s).
    """
    if not grid_step > 0:
        raise InvalidParameterError(f'Grid step must be positive, received: {grid_step}')

    n_o = _lattice_size(params.q_o, grid_step)
    n_s = _lattice_size(params.q_s, grid_step)

    level = 0
    while (n_o // 10 ** level + 1) * (n_s // 10 ** level + 1) > ORACLE_MAX_GRID_POINTS:
        level += 1

    # lattice indices below are in units of grid_step
    coarse = 10 ** level
    best_o, best_s = _argmax_on(
        params,
        np.arange(0, n_o + 1, coarse),
        np.arange(0, n_s + 1, coarse),
        grid_step)
    logger.debug('Coarse maximizer at level %s: (%s, %s)', level, best_o * grid_step, best_s * grid_step)

    ridge = params.eta / (2 * params.gamma_o)
    w_o = int(math.ceil(max(1.0, ridge))) + 2
    w_s = 3
    while level > 0:
        span = 10 ** level
        level -= 1
        fine = 10 ** level
        for _ in range(MAX_RECENTER):
            lo_o, hi_o = max(0, best_o - w_o * span), min(n_o, best_o + w_o * span)
            lo_s, hi_s = max(0, best_s - w_s * span), min(n_s, best_s + w_s * span)
            i_o = np.arange(lo_o - lo_o % fine, hi_o + 1, fine)
            i_s = np.arange(lo_s - lo_s % fine, hi_s + 1, fine)
            best_o, best_s = _argmax_on(params, i_o, i_s, grid_step)
            # a maximizer on an inner window edge means the window missed the peak
            on_edge = (
                (best_o in (i_o[0], i_o[-1]) and best_o not in (0, n_o))
                or (best_s in (i_s[0], i_s[-1]) and best_s not in (0, n_s)))
            if not on_edge:
                break
            logger.debug('Recentering level %s window at (%s, %s)', level, best_o * grid_step, best_s * grid_step)

    return PriceVector(best_o * grid_step, best_s * grid_step)


def oracle_grid_step(params: MarketParams, tolerance: float = ORACLE_PRICE_TOLERANCE) -> float:
    """
    Lattice spacing keeping the lattice maximizer within tolerance of the continuous one per coordinate

    The lattice maximizer of a concave quadratic lies within half a cell diagonal times sqrt(cond)
    of the peak, cond being the condition number of the revenue Hessian; the spacing keeps that
    distance under half the tolerance.
    """
    curvature = np.linalg.eigvalsh(-revenue_hessian(params))
    if not curvature[0] > 0:
        raise InvalidParameterError(f'Revenue has no interior maximum for {params}')
    cond = float(curvature[1] / curvature[0])
    return min(ORACLE_GRID_STEP, tolerance / math.sqrt(2 * cond))


def revenue_grid_step(params: MarketParams, revenue_floor: float, rtol: float = ORACLE_REVENUE_RTOL) -> float:
    """
    Lattice spacing whose maximizer loses at most rtol / 2 of any peak revenue above revenue_floor

    Some lattice point lies within half a cell diagonal of the peak, where a concave quadratic drops by
    at most lambda_max * step^2 / 4.
    """
    if not revenue_floor > 0:
        raise InvalidParameterError(f'Revenue floor must be positive, received: {revenue_floor}')
    curvature = np.linalg.eigvalsh(-revenue_hessian(params))
    if not curvature[0] > 0:
        raise InvalidParameterError(f'Revenue has no interior maximum for {params}')
    return min(ORACLE_GRID_STEP, math.sqrt(2 * rtol * revenue_floor / float(curvature[1])))


def numeric_baseline_argmax(params: MarketParams, grid_step: float = ORACLE_GRID_STEP) -> float:
    """
    On-demand-only revenue maximizer gamma_o p (1 - p / q_o) over a price lattice on [0, q_o]
    """
    prices = np.arange(_lattice_size(params.q_o, grid_step) + 1) * grid_step
    rev = params.gamma_o * prices * np.clip(1.0 - prices / params.q_o, 0.0, 1.0)
    return float(prices[int(np.argmax(rev))])


def gradient_step(params: MarketParams, prices: PriceVector) -> float:
    """
    Difference step small enough that no stencil point moves a share boundary past its neighbor
    """
    b_ns, b_so = selection_thresholds(params, prices)
    margin = min(b_ns, b_so - b_ns, 1.0 - b_so)
    if not margin > 0:
        raise InvalidParameterError(f'Prices {prices} leave a market share empty')
    return 0.05 * margin * min(params.q_s, params.q_o - params.q_s)


def revenue_gradient(params: MarketParams, prices: PriceVector, h: float) -> np.ndarray:
    """
    Central finite-difference gradient of the total revenue
    """
    def f(p_o: float, p_s: float) -> float:
        return revenue(params, PriceVector(p_o, p_s)).pi_total

    return np.array([
        (f(prices.p_o + h, prices.p_s) - f(prices.p_o - h, prices.p_s)) / (2 * h),
        (f(prices.p_o, prices.p_s + h) - f(prices.p_o, prices.p_s - h)) / (2 * h)
    ])


# #####################################
# Integration over willingness to pay

def _choices(params: MarketParams, prices: PriceVector, thetas: np.ndarray) -> np.ndarray:
    """
    Index into CHOICE_ORDER of the utility-maximizing service per theta
    """
    utilities = np.stack([
        np.zeros_like(thetas),
        thetas * params.q_s - prices.p_s,
        thetas * params.q_o - prices.p_o
    ])
    return np.argmax(utilities, axis=0)


def _switch_points(params: MarketParams, prices: PriceVector, grid: int) -> List[float]:
    """
    Willingness-to-pay values where the chosen service changes, located by bisection within grid cells
    """
    thetas = np.linspace(0.0, 1.0, grid + 1)
    choices = _choices(params, prices, thetas)
    cells = np.nonzero(choices[:-1] != choices[1:])[0]

    def choice_at(t: float) -> int:
        return int(_choices(params, prices, np.array([t]))[0])

    points = []
    for k in cells:
        lo, hi_end = float(thetas[k]), float(thetas[k + 1])
        right = int(choices[k + 1])
        while True:
            left = choice_at(lo)
            hi = hi_end
            for _ in range(BISECTION_ITERATIONS):
                mid = (lo + hi) / 2
                if choice_at(mid) == left:
                    lo = mid
                else:
                    hi = mid
            points.append(hi)
            if choice_at(hi) == right or hi >= hi_end:
                break
            lo = hi
    return points


def _segments(params: MarketParams, prices: PriceVector, grid: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Midpoints, widths and choices of the grid cells split at every switch point
    """
    edges = np.union1d(np.linspace(0.0, 1.0, grid + 1), _switch_points(params, prices, grid))
    widths = np.diff(edges)
    mids = edges[:-1] + widths / 2
    return mids, widths, _choices(params, prices, mids)


def numeric_revenue(params: MarketParams, prices: PriceVector, grid: int = REVENUE_INTEGRATION_GRID) -> float:
    _, widths, choices = _segments(params, prices, grid)
    share_s = widths[choices == CHOICE_ORDER.index(ServiceChoice.SPOT)].sum()
    share_o = widths[choices == CHOICE_ORDER.index(ServiceChoice.ON_DEMAND)].sum()
    return float(prices.p_o * params.gamma_o * share_o + prices.p_s * params.gamma_s * share_s)


def numeric_aggregate_utilities(
    params: MarketParams, prices: PriceVector, grid: int = UTILITY_INTEGRATION_GRID
) -> Tuple[float, float]:
    """
    Midpoint-rule integrals of (theta q_a - p_a) gamma_a over the on-demand and spot shares
    """
    mids, widths, choices = _segments(params, prices, grid)
    od = choices == CHOICE_ORDER.index(ServiceChoice.ON_DEMAND)
    spot = choices == CHOICE_ORDER.index(ServiceChoice.SPOT)
    agg_o = params.gamma_o * ((mids[od] * params.q_o - prices.p_o) * widths[od]).sum()
    agg_s = params.gamma_s * ((mids[spot] * params.q_s - prices.p_s) * widths[spot]).sum()
    return float(agg_o), float(agg_s)


# #####################################
# Random parameterizations

def draw_c1_params(rng: np.random.Generator, count: int) -> List[MarketParams]:
    """
    Rejection-sample parameterizations with an interior equilibrium

    q_o uniform in DRAW_QO_RANGE, q_s in (0, q_o), gamma_o and gamma_s in (0, 1]
    """
    out: List[MarketParams] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        q_o = float(rng.uniform(*DRAW_QO_RANGE))
        q_s = float(q_o * (1.0 - rng.random()))
        gamma_o = float(1.0 - rng.random())
        gamma_s = float(1.0 - rng.random())
        if not 0 < q_s < q_o:
            continue
        params = MarketParams(q_o, q_s, gamma_o, gamma_s)
        if c1_violation(params) is None:
            out.append(params)
    logger.debug('Drew %s parameterizations in %s attempts', count, attempts)
    return out
