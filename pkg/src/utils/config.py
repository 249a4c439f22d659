"""
Config - All project settings in one place
===========================================
"""

import os
from dotenv import load_dotenv

# Load .env file
load_dotenv()

# =============================================================================
# SOLVER BACKEND (from .env file)
# =============================================================================

# "highs" = scipy.optimize.linprog(method="highs"), "pulp" = PuLP + CBC
SOLVER_BACKEND = os.getenv("RANKING_LP_SOLVER", "highs")
SOLVER_BACKENDS = ("highs", "pulp")

# Seconds per solve, unset = no limit
_time_limit = os.getenv("RANKING_SOLVER_TIME_LIMIT")
SOLVER_TIME_LIMIT = float(_time_limit) if _time_limit else None

# =============================================================================
# NUMERICAL TOLERANCES
# =============================================================================

SOLVER_TOLERANCE = 1e-7      # feasibility of reported LP values, binding-row slack
REPAIR_TOLERANCE = 1e-6      # largest violation extract_price_grid will repair
TABLE_TOLERANCE = 1e-5       # agreement with published table values
GRID_CHECK_TOLERANCE = 1e-9  # PriceGrid invariants on construction
SANDWICH_TOLERANCE = 1e-9

# =============================================================================
# RESOURCE CAPS
# =============================================================================

# Laptop profile, override with --force
MODEL_MEMORY_CAP_GIB = float(os.getenv("RANKING_MODEL_MEMORY_GIB", "8"))
BYTES_PER_NONZERO = 16       # value + column index + builder overhead
BYTES_PER_ROW = 96

# certify_lower gives up (and says so) after this many paths
CERTIFY_PATH_BUDGET = int(os.getenv("RANKING_CERTIFY_PATH_BUDGET", "5000000"))
CERTIFY_BLOCK_SIZE = 20000

# =============================================================================
# LOCAL SEARCH
# =============================================================================

SEARCH_CONVERGENCE_EPSILON = 1e-9
SEARCH_ADD_THRESHOLD = 1e-5
SEARCH_REMOVAL_SLACK = 1e-9
SEARCH_MAX_ITERATIONS = 500
SEARCH_INITIAL_BOUND = 1 + 1e-9

# Warm-start ladder: largest m=n solved exactly before doubling
WARM_START_EXACT_N = 5

# Heuristic lower search starts from all paths below this count
HEURISTIC_FULL_START_PATHS = 5000

# =============================================================================
# SIMULATION
# =============================================================================

DEFAULT_SEED = 0
EDGE_SUITE_INSTANCES = 10000
SANDWICH_SUITE_TRIALS = 1000
SANDWICH_SUITE_DIMS = [(3, 3), (4, 6), (6, 4), (6, 6)]
WITNESS_SUITE_MAX_N = 4
COUNTS_SUITE_MAX = 8

# =============================================================================
# DATA PATHS
# =============================================================================

RESULTS_DIR = os.getenv("RANKING_RESULTS_DIR", "results")
# Sub-directories of the results root
SOLUTIONS_SUBDIR = "solutions"
TABLES_SUBDIR = "tables"
CHECKPOINTS_SUBDIR = "checkpoints"
COUNTEREXAMPLES_SUBDIR = "counterexamples"

# Output file names
TABLE_ROWS_FILE = "table_rows.csv"

# =============================================================================
# FILE FORMATS
# =============================================================================

SOLUTION_SCHEMA_VERSION = 1
TABLE_COLUMNS = ["m", "n", "value", "mode", "runtime_seconds"]
ITERATION_COLUMNS = ["iteration", "gamma", "set_size", "seconds", "additions", "removals"]
FLOAT_FORMAT = "%.6f"
TABLE_MODES = ("exact-lower", "heuristic-lower", "certified-lower", "uncertified-lower",
               "exact-upper", "search-upper")

# Bumped whenever the LP generators change their output
GENERATOR_VERSION = "1.0"
