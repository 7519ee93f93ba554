from dataclasses import dataclass
from typing import Iterable, Optional, Tuple
import numpy as np
import pandas as pd

from spotmarket.constants import DENOMINATOR_GUARD, FEASIBILITY_TOLERANCE
from spotmarket.market.selection import check_c0, per_unit_utility, revenue
from spotmarket.market.types import Interval, MarketParams, MarketShares, PriceVector
from spotmarket.util import setup_logger
from .baseline import on_demand_only_equilibrium

logger = setup_logger(__name__)


# #####################################
# Existence of the interior equilibrium

class EquilibriumConditionError(ValueError):
    """
    No unique interior equilibrium exists for the given parameters

    :param bound: which part of C1 failed, one of 'lower', 'upper', 'determinant'
    """

    def __init__(self, bound: str, msg: str):
        super().__init__(msg)
        self.bound = bound


def denominator(params: MarketParams) -> float:
    """
    D = 4 gamma_o gamma_s q_o - eta^2 q_s, shared by every equilibrium closed form
    """
    return 4 * params.gamma_o * params.gamma_s * params.q_o - params.eta ** 2 * params.q_s


def c1_violation(params: MarketParams) -> Optional[EquilibriumConditionError]:
    """
    Returns the error describing the first failed part of C1, or None when an interior equilibrium exists
    """
    eta = params.eta
    if not params.gamma_o < eta / 2:
        return EquilibriumConditionError(
            'upper',
            f'C1 upper bound γ_o < η/2 violated: γ_o={params.gamma_o}, η/2={eta / 2}')
    lower = eta * params.q_s / (2 * params.q_o)
    if not lower < params.gamma_o:
        return EquilibriumConditionError(
            'lower',
            f'C1 lower bound η·q_s/(2·q_o) < γ_o violated: η·q_s/(2·q_o)={lower}, γ_o={params.gamma_o}')
    d = denominator(params)
    if not d > DENOMINATOR_GUARD * params.gamma_o * params.gamma_s * params.q_o:
        return EquilibriumConditionError(
            'determinant',
            f'C1 near-singular: 4·γ_o·γ_s·q_o − η²·q_s = {d} too close to 0')
    return None


def check_c1(params: MarketParams) -> bool:
    eta = params.eta
    return eta * params.q_s / (2 * params.q_o) < params.gamma_o < eta / 2


def require_c1(params: MarketParams) -> float:
    """
    Raise EquilibriumConditionError unless C1 holds with a well-conditioned denominator; returns D
    """
    err = c1_violation(params)
    if err is not None:
        raise err
    return denominator(params)


# #####################################
# Closed forms

@dataclass(frozen=True)
class EquilibriumOutcome:
    params: MarketParams
    prices: PriceVector
    shares: MarketShares
    boundaries: Tuple[float, float]
    revenue_o: float
    revenue_s: float
    revenue_total: float
    agg_utility_o: float
    agg_utility_s: float
    load: float
    within_capacity: bool

    @property
    def agg_utility_total(self) -> float:
        return self.agg_utility_o + self.agg_utility_s


def equilibrium_prices(params: MarketParams) -> PriceVector:
    d = require_c1(params)
    go, gs, qo, qs = params.gamma_o, params.gamma_s, params.q_o, params.q_s
    return PriceVector(
        p_o=2 * go * gs * qo * (qo - qs) / d,
        p_s=params.eta * go * qs * (qo - qs) / d
    )


def equilibrium_share_boundaries(params: MarketParams) -> Tuple[float, float]:
    """
    (none/spot, spot/on-demand) willingness-to-pay boundaries at the equilibrium

    :returns: (b_ns, b_so) with 0 < b_ns < b_so < 1 under C1
    """
    d = require_c1(params)
    go, gs, qo, qs, eta = params.gamma_o, params.gamma_s, params.q_o, params.q_s, params.eta
    b_ns = eta * go * (qo - qs) / d
    b_so = (2 * go * gs * qo - eta * go * qs) / d
    return b_ns, b_so


def equilibrium_revenue(params: MarketParams) -> float:
    """
    Maximum revenue gamma_o^2 gamma_s q_o (q_o - q_s) / D
    """
    d = require_c1(params)
    return params.gamma_o ** 2 * params.gamma_s * params.q_o * (params.q_o - params.q_s) / d


def aggregate_utilities(params: MarketParams) -> Tuple[float, float]:
    """
    Aggregate customer surplus of the on-demand and spot customers at the equilibrium

    :returns: (agg_o, agg_s), both non-negative under C1
    """
    d = require_c1(params)
    go, gs, qo, qs, eta = params.gamma_o, params.gamma_s, params.q_o, params.q_s, params.eta
    agg_o = (
        qo * go * gs * (2 * go * qo - eta * qs)
        * (go * qs * (gs - go) + 2 * go * gs * (qo + qs) - eta ** 2 * qs)
        / (2 * d ** 2)
    )
    agg_s = go ** 2 * gs * qo ** 2 * qs * (gs - go) ** 2 / (2 * d ** 2)
    return agg_o, agg_s


def equilibrium(params: MarketParams) -> EquilibriumOutcome:
    """
    Unique revenue-maximizing prices and the market they induce

    Raises EquilibriumConditionError naming the failed bound when C1 does not hold.
    """
    prices = equilibrium_prices(params)
    b_ns, b_so = equilibrium_share_boundaries(params)
    shares = MarketShares(
        theta_n=Interval(0.0, b_ns, closed_lower=True),
        theta_s=Interval(b_ns, b_so),
        theta_o=Interval(b_so, 1.0)
    )
    assert check_c0(params, prices), f'C0 must hold at the equilibrium, prices: {prices}'

    revenue_o = prices.p_o * params.gamma_o * shares.theta_o.length
    revenue_s = prices.p_s * params.gamma_s * shares.theta_s.length
    agg_o, agg_s = aggregate_utilities(params)
    load = params.gamma_o * shares.theta_o.length + params.gamma_s * shares.theta_s.length

    logger.debug('Equilibrium for %s: %s, shares %s', params, prices, shares)
    return EquilibriumOutcome(
        params=params,
        prices=prices,
        shares=shares,
        boundaries=(b_ns, b_so),
        revenue_o=revenue_o,
        revenue_s=revenue_s,
        revenue_total=equilibrium_revenue(params),
        agg_utility_o=agg_o,
        agg_utility_s=agg_s,
        load=load,
        within_capacity=load <= params.capacity
    )


def equilibrium_spot_floor(params: MarketParams, on_demand_price: float) -> float:
    """
    Spot price floor matching the equilibrium spot/on-demand price ratio at a given on-demand price
    """
    prices = equilibrium_prices(params)
    return on_demand_price * prices.p_s / prices.p_o


def first_order_residuals(params: MarketParams, prices: PriceVector) -> Tuple[float, float]:
    """
    Relative residuals of the two stationarity identities of the revenue in the interior region

    p_s = gamma_o / eta (2 p_o - q_o + q_s) and p_o = 2 gamma_s q_o p_s / (eta q_s)
    """
    eta = params.eta
    p_s_hat = params.gamma_o / eta * (2 * prices.p_o - params.q_o + params.q_s)
    p_o_hat = 2 * params.gamma_s * params.q_o * prices.p_s / (eta * params.q_s)
    r_s = abs(p_s_hat - prices.p_s) / max(abs(prices.p_s), FEASIBILITY_TOLERANCE)
    r_o = abs(p_o_hat - prices.p_o) / max(abs(prices.p_o), FEASIBILITY_TOLERANCE)
    return r_s, r_o


# #####################################
# Market comparison

@dataclass(frozen=True)
class ComparisonReport:
    """
    On-demand + spot market against the on-demand-only market

    Each check holds the boolean and the two compared values, spot market first.
    """
    price_higher: Tuple[bool, float, float]
    on_demand_share_lower: Tuple[bool, float, float]
    total_share_higher: Tuple[bool, float, float]
    revenue_higher: Tuple[bool, float, float]

    @property
    def all_hold(self) -> bool:
        return all(c[0] for c in [
            self.price_higher, self.on_demand_share_lower, self.total_share_higher, self.revenue_higher
        ])


def compare_markets(params: MarketParams) -> ComparisonReport:
    eq = equilibrium(params)
    base = on_demand_only_equilibrium(params)
    share_o = eq.shares.theta_o.length
    share_total = share_o + eq.shares.theta_s.length
    return ComparisonReport(
        price_higher=(eq.prices.p_o > base.price, eq.prices.p_o, base.price),
        on_demand_share_lower=(share_o < base.share_length, share_o, base.share_length),
        total_share_higher=(share_total > base.share_length, share_total, base.share_length),
        revenue_higher=(eq.revenue_total > base.revenue, eq.revenue_total, base.revenue)
    )


# #####################################
# Concavity

@dataclass(frozen=True)
class HessianReport:
    trace: float
    determinant_sign_term: float
    negative_definite: bool
    # None when the prices sit outside the region where both shares are nonempty
    finite_difference_ok: Optional[bool]


def revenue_hessian(params: MarketParams) -> np.ndarray:
    """
    Hessian of the revenue in (p_o, p_s) where both spot and on-demand shares are nonempty; price-independent
    """
    delta = params.q_o - params.q_s
    h11 = -2 * params.gamma_o / delta
    h22 = -2 * params.gamma_s / delta - 2 * params.gamma_s / params.q_s
    h12 = params.eta / delta
    return np.array([[h11, h12], [h12, h22]])


def _interior(params: MarketParams, p_o: float, p_s: float) -> bool:
    if p_o < 0 or p_s < 0 or not p_o * params.q_s > p_s * params.q_o:
        return False
    b_ns = p_s / params.q_s
    b_so = (p_o - p_s) / (params.q_o - params.q_s)
    return 0 < b_ns < b_so < 1


def _finite_difference_hessian(params: MarketParams, prices: PriceVector, h: float) -> Optional[np.ndarray]:
    offsets = [(dx, dy) for dx in (-h, 0.0, h) for dy in (-h, 0.0, h)]
    if not all(_interior(params, prices.p_o + dx, prices.p_s + dy) for dx, dy in offsets):
        return None

    def f(dx: float, dy: float) -> float:
        return revenue(params, PriceVector(prices.p_o + dx, prices.p_s + dy)).pi_total

    f0 = f(0, 0)
    h11 = (f(h, 0) - 2 * f0 + f(-h, 0)) / h ** 2
    h22 = (f(0, h) - 2 * f0 + f(0, -h)) / h ** 2
    h12 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h ** 2)
    return np.array([[h11, h12], [h12, h22]])


def hessian_check(params: MarketParams, prices: PriceVector, rtol: float = 1e-4) -> HessianReport:
    analytic = revenue_hessian(params)
    d = denominator(params)

    fd = _finite_difference_hessian(params, prices, h=1e-4 * params.q_o)
    fd_ok: Optional[bool] = None
    if fd is not None:
        scale = np.abs(analytic).max()
        fd_ok = bool(np.abs(fd - analytic).max() <= rtol * scale)
        if not fd_ok:
            logger.debug('Finite-difference Hessian %s disagrees with %s', fd, analytic)

    return HessianReport(
        trace=float(np.trace(analytic)),
        determinant_sign_term=d,
        negative_definite=d > 0,
        finite_difference_ok=fd_ok
    )


# #####################################
# Per-customer view

def utility_profile(params: MarketParams, thetas: Iterable[float]) -> pd.DataFrame:
    """
    Choice and utility per unit resource of each willingness to pay, with and without the spot service

    Columns: theta, choice, utility, baseline_choice, baseline_utility
    """
    eq_prices = equilibrium_prices(params)
    base = on_demand_only_equilibrium(params)
    # on-demand-only market: no spot share, so spot is priced out at q_s
    base_prices = PriceVector(base.price, params.q_s)
    rows = []
    for theta in thetas:
        choice, u = per_unit_utility(theta, params, eq_prices)
        b_choice, b_u = per_unit_utility(theta, params, base_prices)
        rows.append({
            'theta': theta,
            'choice': choice.value,
            'utility': u,
            'baseline_choice': b_choice.value,
            'baseline_utility': b_u
        })
    return pd.DataFrame(rows, columns=['theta', 'choice', 'utility', 'baseline_choice', 'baseline_utility'])
