from typing import NamedTuple, Tuple
import numpy as np

from spotmarket.util import InvalidParameterError, setup_logger
from .types import Customer, Interval, MarketParams, MarketShares, PriceVector, ServiceChoice

logger = setup_logger(__name__)


class Revenue(NamedTuple):
    pi_o: float
    pi_s: float
    pi_total: float


def customer_utility(c: Customer, choice: ServiceChoice, params: MarketParams, prices: PriceVector) -> float:
    """
    Utility of a customer for a service: theta * q_a * x - p_a * x, and 0 for no service

    Negative for paid services priced above the customer's valuation; selection, not this function,
    keeps chosen utilities non-negative.
    """
    if choice == ServiceChoice.ON_DEMAND:
        return c.theta * params.q_o * c.demand - prices.p_o * c.demand
    if choice == ServiceChoice.SPOT:
        return c.theta * params.q_s * c.demand - prices.p_s * c.demand
    return 0.0


def check_c0(params: MarketParams, prices: PriceVector) -> bool:
    """
    Spot keeps a positive market share only if p_o / q_o > p_s / q_s (strict)
    """
    if params.q_o <= 0 or params.q_s <= 0:
        raise InvalidParameterError(f'QoS levels must be positive, received: q_o={params.q_o}, q_s={params.q_s}')
    return prices.p_o * params.q_s > prices.p_s * params.q_o


def selection_thresholds(params: MarketParams, prices: PriceVector) -> Tuple[float, float]:
    """
    (none/spot, spot/on-demand) willingness-to-pay thresholds, clamped so 0 <= b_ns <= b_so <= 1

    When C0 fails the spot interval collapses and both thresholds sit at p_o / q_o.
    """
    if params.q_s == 0 or params.q_o == params.q_s:
        raise InvalidParameterError(
            f'Thresholds undefined for q_o={params.q_o}, q_s={params.q_s}: requires q_o > q_s > 0')
    if check_c0(params, prices):
        b_ns = prices.p_s / params.q_s
        b_so = (prices.p_o - prices.p_s) / (params.q_o - params.q_s)
    else:
        b_ns = b_so = prices.p_o / params.q_o
    b_ns = min(max(b_ns, 0.0), 1.0)
    b_so = min(max(b_so, b_ns), 1.0)
    return b_ns, b_so


def best_response(theta: float, params: MarketParams, prices: PriceVector) -> ServiceChoice:
    """
    Stage-II service selection; thresholds are lower-open and upper-closed

    :param theta: willingness to pay in [0, 1]
    :returns: ON_DEMAND iff b_so < theta, SPOT iff b_ns < theta <= b_so, NONE otherwise
    """
    if not 0 <= theta <= 1:
        raise InvalidParameterError(f'Willingness to pay must lie in [0, 1], received: {theta}')
    b_ns, b_so = selection_thresholds(params, prices)
    if theta > b_so:
        return ServiceChoice.ON_DEMAND
    if theta > b_ns:
        return ServiceChoice.SPOT
    return ServiceChoice.NONE


def market_shares(params: MarketParams, prices: PriceVector) -> MarketShares:
    b_ns, b_so = selection_thresholds(params, prices)
    return MarketShares(
        theta_n=Interval(0.0, b_ns, closed_lower=True),
        theta_s=Interval(b_ns, b_so),
        theta_o=Interval(b_so, 1.0)
    )


def revenue(params: MarketParams, prices: PriceVector) -> Revenue:
    shares = market_shares(params, prices)
    pi_o = prices.p_o * params.gamma_o * shares.theta_o.length
    pi_s = prices.p_s * params.gamma_s * shares.theta_s.length
    return Revenue(pi_o, pi_s, pi_o + pi_s)


def revenue_surface(params: MarketParams, p_o: np.ndarray, p_s: np.ndarray) -> np.ndarray:
    """
    Vectorized total revenue over broadcastable price arrays, same selection rule as revenue()
    """
    p_o = np.asarray(p_o, dtype=float)
    p_s = np.asarray(p_s, dtype=float)
    c0 = p_o * params.q_s > p_s * params.q_o
    b_ns = np.where(c0, p_s / params.q_s, p_o / params.q_o)
    b_so = np.where(c0, (p_o - p_s) / (params.q_o - params.q_s), p_o / params.q_o)
    lo = np.clip(b_ns, 0.0, 1.0)
    hi = np.clip(np.maximum(b_so, lo), 0.0, 1.0)
    return p_o * params.gamma_o * (1.0 - hi) + p_s * params.gamma_s * (hi - lo)


def resource_load(params: MarketParams, prices: PriceVector) -> float:
    """
    Aggregate resource usage gamma_o |Theta_o| + gamma_s |Theta_s| implied by the shares
    """
    shares = market_shares(params, prices)
    return params.gamma_o * shares.theta_o.length + params.gamma_s * shares.theta_s.length


def within_capacity(params: MarketParams, prices: PriceVector) -> bool:
    load = resource_load(params, prices)
    if load > params.capacity:
        logger.debug('Load %s exceeds capacity %s at prices %s', load, params.capacity, prices)
    return load <= params.capacity


def per_unit_utility(theta: float, params: MarketParams, prices: PriceVector) -> Tuple[ServiceChoice, float]:
    choice = best_response(theta, params, prices)
    return choice, customer_utility(Customer(theta, 1.0), choice, params, prices)
