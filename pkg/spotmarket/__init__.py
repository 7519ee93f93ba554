from spotmarket.market import (  # noqa: F401
    MarketParams,
    PriceVector,
    Customer,
    ServiceChoice,
    MarketShares,
    best_response,
    market_shares,
    revenue
)

from spotmarket.equilibrium import (  # noqa: F401
    EquilibriumConditionError,
    EquilibriumOutcome,
    equilibrium,
    on_demand_only_equilibrium,
    compare_markets,
    aggregate_utilities,
    numeric_revenue_argmax
)

from spotmarket.ilp import (  # noqa: F401
    IlpProblem, IlpSolution, IlpStatus, ProblemSizeError, solve, solve_exhaustive
)

from spotmarket.simulator import (  # noqa: F401
    SimulationConfig, SimulatorState, SimulationComplete, step, run, read_trace, read_config
)

from ._version import get_versions

__version__ = get_versions()["version"]
del get_versions
