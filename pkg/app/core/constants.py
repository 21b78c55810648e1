TOOL_NAME = "subagging-cv"
TOOL_VERSION = "1.0.0"

# Exact leave-v-out enumeration is used while C(n, v) stays below this
ENUMERATION_CAP = 100_000
DEFAULT_DRAWS = 1000

WEIGHT_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-12
TIE_TOLERANCE = 1e-12

SHATTER_POINT_CAP = 20
VC_SEARCH_CAP = 12
VC_RANDOM_CONFIGURATIONS = 25

MIN_REPLICATES = 100
MIN_GHOST_SIZE = 1000
DEFAULT_REPLICATES = 1000
DEFAULT_GHOST_SIZE = 20_000
MAX_SIMULATION_N = 200

ORACLE_MAX_M = 4
ORACLE_MAX_N = 5

# Test fraction at and above which the Hoeffding branch wins the ERM pair
SELECTION_P_LIMIT = 1.0 / 18.0

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_INVALID_CONFIG = 2
EXIT_VIOLATION = 3
