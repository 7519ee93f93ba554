from dataclasses import dataclass

from spotmarket.market.types import MarketParams


@dataclass(frozen=True)
class BaselineOutcome:
    """
    Revenue-maximizing outcome of a provider offering on-demand instances only

    :param price: on-demand price, q_o / 2
    :param share_length: on-demand market share, 1 / 2
    :param revenue: gamma_o * q_o / 4
    """
    price: float
    share_length: float
    revenue: float


def on_demand_only_equilibrium(params: MarketParams) -> BaselineOutcome:
    return BaselineOutcome(
        price=params.q_o / 2,
        share_length=0.5,
        revenue=params.gamma_o * params.q_o / 4
    )


def baseline_aggregate_utility(params: MarketParams) -> float:
    """
    Customer surplus of the on-demand-only market: integral of (theta q_o - q_o/2) gamma_o over (1/2, 1]
    """
    return params.gamma_o * params.q_o / 8


def baseline_revenue(params: MarketParams, price: float) -> float:
    """
    On-demand-only revenue gamma_o p (1 - p / q_o), clamped to an empty market above q_o
    """
    share = min(max(1.0 - price / params.q_o, 0.0), 1.0)
    return params.gamma_o * price * share
