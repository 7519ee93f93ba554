from .baseline import (
    BaselineOutcome, on_demand_only_equilibrium, baseline_aggregate_utility, baseline_revenue
)
from .closed_form import (
    EquilibriumConditionError, EquilibriumOutcome, ComparisonReport, HessianReport,
    check_c1, c1_violation, require_c1, denominator,
    equilibrium, equilibrium_prices, equilibrium_share_boundaries, equilibrium_revenue,
    aggregate_utilities, compare_markets, hessian_check, revenue_hessian, first_order_residuals,
    equilibrium_spot_floor, utility_profile
)
from .oracle import (
    numeric_revenue_argmax, numeric_baseline_argmax, oracle_grid_step, revenue_grid_step, gradient_step, revenue_gradient,
    numeric_revenue, numeric_aggregate_utilities, draw_c1_params
)
