"""Centralized constants for seqham."""

# Exact-solver caps (vertex counts)
BRUTE_HAMILTON_CAP = 12
ENUMERATE_HAMILTON_CAP = 10
PATTERN_EXACT_CAP = 14
SPREAD_CAP = 8
COUPLING_CAP = 10
LONGEST_PATH_CAP = 10

# Environment overrides for the caps above
ENV_BRUTE_CAP = "SEQHAM_BRUTE_CAP"
ENV_ENUM_CAP = "SEQHAM_ENUM_CAP"
ENV_PATTERN_CAP = "SEQHAM_PATTERN_CAP"
ENV_SPREAD_CAP = "SEQHAM_SPREAD_CAP"
ENV_WORKERS = "SEQHAM_WORKERS"

# Randomness
RNG_SCHEME = "philox-v1"

# Rotation-extension solver
STATE_BUDGET_FACTOR = 50  # states per n^2
DEFAULT_CLOSURE_SOURCES = 32

# Heuristic pattern search
DEFAULT_NODE_BUDGET = 200_000

# Ordered-subset pipeline
DEFAULT_OMEGA = 2.0
ANCHOR_ATTEMPTS = 10
ANCHOR_MAX_LENGTH = 6
ANCHOR_HOP_DEPTH = 3
CORE_FLOOR_FRACTION = 0.4
MIN_DIAMETER_BUDGET = 3

# Greedy low-inversion walk
MIN_U_TARGET = 4

# Sweep output
CSV_COLUMNS = ("point", "trials", "successes", "p_hat", "stderr", "stat", "errors")
CSV_SIGNIFICANT_DIGITS = 6

# Logging
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_LOG_HANDLER = "console"  # console or file
DEFAULT_LOG_FILE = "seqham.log"
