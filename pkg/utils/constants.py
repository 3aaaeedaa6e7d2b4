"""
Constants used throughout the resochi toolkit
"""

# Application information
APP_NAME = "resochi"
APP_DISPLAY_NAME = "resochi - Resonances and Mean Euler Characteristics"
APP_VERSION = "1.0.0"
APP_CONFIG_DIR_ENV = "RESOCHI_CONFIG_DIR"
APP_THREADS_ENV = "RESOCHI_THREADS"

# Default run values
DEFAULT_TOL = 1e-9
DEFAULT_COEFF_BOUND = 20
DEFAULT_K_MAX = 10_000
DEFAULT_N_LIST = (100, 1000, 10_000)
DEFAULT_FORMAT = "json"
DEFAULT_SEED = 0
DEFAULT_THREADS = 1

# Numeric tolerances
WITNESS_PRECISION_DPS = 30
BOUNDARY_TOL = 1e-12
DEGENERACY_TOL = 1e-9
ENVELOPE_TOL = 0.005
FLOAT_SIGNIFICANT_DIGITS = 12

# Relation detection
LOVASZ_DELTA = (3, 4)
RELATION_SCALE_FACTOR = 100
RELATION_SCALE_BITS = 44

# Output formats
FORMAT_JSON = "json"
FORMAT_CSV = "csv"
FORMAT_TEXT = "text"
SUPPORTED_FORMATS = [FORMAT_JSON, FORMAT_CSV, FORMAT_TEXT]

# Exit codes
EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_VERDICT_FAILED = 2

# Resonance index filters
FILTER_NONE = "none"
FILTER_DROP_ZERO = "drop-zero"
FILTER_DROP_RATIONAL = "drop-rational"
SUPPORTED_FILTERS = [FILTER_NONE, FILTER_DROP_ZERO, FILTER_DROP_RATIONAL]

# Truncation directions
DIRECTION_POSITIVE = "positive"
DIRECTION_NEGATIVE = "negative"
SUPPORTED_DIRECTIONS = [DIRECTION_POSITIVE, DIRECTION_NEGATIVE]

# Orbit classes
ORBIT_GOOD = "good"
ORBIT_BAD = "bad"

# Iterate-law kinds in orbit-system files
LAW_TABLE = "table"
LAW_BLOCKS = "blocks"

# Block kinds of a linearized return map
BLOCK_ELLIPTIC = "elliptic"
BLOCK_POSITIVE_HYPERBOLIC = "positive_hyperbolic"
BLOCK_NEGATIVE_HYPERBOLIC = "negative_hyperbolic"

# Ellipsoid modes
MODE_FORMAL = "formal"
MODE_NUMERIC = "numeric"

# Models
MODEL_ELLIPSOID = "ellipsoid"
MODEL_CPN = "cpn"
MODEL_USTILOVSKY = "ustilovsky"
SUPPORTED_MODELS = [MODEL_ELLIPSOID, MODEL_CPN, MODEL_USTILOVSKY]

# Number of parity checks made when an orbit system is built
PARITY_CHECK_ITERATES = 8

# Scan histogram
SCAN_HISTOGRAM_BINS = 10
SCAN_CHUNK_SIZE = 20_000
