from .types import (
    MarketParams, PriceVector, Customer, ServiceChoice, Interval, MarketShares
)
from .selection import (
    Revenue,
    customer_utility, best_response, market_shares, check_c0, revenue, revenue_surface,
    selection_thresholds, resource_load, within_capacity, per_unit_utility
)
