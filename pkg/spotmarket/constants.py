# ###############################################################
VERBOSE = False  # set to true for debug
# ###############################################################
# numeric tolerances
SHARE_TOLERANCE = 1e-12
FEASIBILITY_TOLERANCE = 1e-9
# equilibrium price denominator must exceed this fraction of gamma_o * gamma_s * q_o
DENOMINATOR_GUARD = 1e-9

# ###############################################################
# oracles
ORACLE_GRID_STEP = 0.01
ORACLE_PRICE_TOLERANCE = 0.02
ORACLE_REVENUE_RTOL = 1e-4
# coarsest lattice evaluated in one shot by the grid oracle
ORACLE_MAX_GRID_POINTS = 250_000
REVENUE_INTEGRATION_GRID = 100_000
UTILITY_INTEGRATION_GRID = 1_000_000
BISECTION_ITERATIONS = 80

# random parameter draws for property suites
DRAW_QO_RANGE = (10.0, 1000.0)
DRAW_SEED = 7

# ###############################################################
# ilp
ILP_MAX_VARIABLES = 64
# objective values closer than this count as ties
IMPROVEMENT_TOLERANCE = 1e-9
# brute-force enumeration enumerates 2^n assignments in memory
EXHAUSTIVE_MAX_VARIABLES = 20

# ###############################################################
# simulator defaults
PRIORITY_WEIGHT = 1000.0
EVICTION_EPSILON = 0.001
DEFAULT_ON_DEMAND_PRICE = 10.0
DEFAULT_SPOT_FLOOR = 3.0
DEFAULT_TH_SOFT = 0.5
DEFAULT_TH_HARD = 0.7

ALGORITHM_HEURISTIC = 'heuristic'
ALGORITHM_ILP = 'ilp'
ALGORITHM_NONE = 'none'
ALGORITHMS = (ALGORITHM_HEURISTIC, ALGORITHM_ILP, ALGORITHM_NONE)

TRACE_COLUMNS = ['slot', 'kind', 'cpu', 'ram', 'bid', 'lifetime']
OUTPUT_COLUMNS = ['slot', 'avg_cpu', 'avg_ram', 'spot_price', 'revenue', 'cum_revenue', 'evictions', 'rejections']

# ###############################################################
# cli exit codes
EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_C1_INFEASIBLE = 2
EXIT_USAGE = 64
EXIT_DATA_FORMAT = 65

# table formatting
TABLE_SIGNIFICANT_DIGITS = 6
