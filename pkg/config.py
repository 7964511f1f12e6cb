"""
Configuration file for the Lévy toolkit
All environment variables and numerical defaults
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# ================================================
# GRID CONFIGURATION
# ================================================

# Default log-spaced radial grid (overridable per spec file)
GRID_R_MIN = float(os.getenv('GRID_R_MIN', 1e-6))
GRID_R_MAX = float(os.getenv('GRID_R_MAX', 1e6))
GRID_POINTS = int(os.getenv('GRID_POINTS', 512))

# Minimum tabulation size accepted by the dimension walk
MIN_PROFILE_POINTS = 64

# ψ* construction
MONOTONE_SCAN_POINTS = int(os.getenv('MONOTONE_SCAN_POINTS', 256))
PSI_STAR_REFINEMENT = int(os.getenv('PSI_STAR_REFINEMENT', 8))
BISECTION_ITERATIONS = int(os.getenv('BISECTION_ITERATIONS', 60))

# ================================================
# QUADRATURE
# ================================================
QUAD_ABS_TOL = float(os.getenv('QUAD_ABS_TOL', 1e-13))
QUAD_REL_TOL = float(os.getenv('QUAD_REL_TOL', 1e-10))

# Number of Bessel-zero intervals summed directly before switching to acceleration
QUAD_INTERVAL_BUDGET = int(os.getenv('QUAD_INTERVAL_BUDGET', 4000))

# Series acceleration: terms summed and averaging levels
EULER_TERMS = int(os.getenv('EULER_TERMS', 400))
EULER_LEVELS = int(os.getenv('EULER_LEVELS', 24))

# R·r_max below which plain adaptive quadrature is used
COMPACT_OSCILLATION_LIMIT = float(os.getenv('COMPACT_OSCILLATION_LIMIT', 50.0))

# Gauss-Legendre nodes per partition interval
GAUSS_NODES = int(os.getenv('GAUSS_NODES', 20))

# Dimension-walk negativity floor, relative to the profile peak
NOISE_FLOOR = float(os.getenv('NOISE_FLOOR', 1e-8))

# ================================================
# CHECKS AND REPORTS
# ================================================

# Headroom applied to grid-scanned constants (a grid max is a lower bound for a sup)
CONSTANT_HEADROOM = float(os.getenv('CONSTANT_HEADROOM', 1.05))

# Tolerance widening for ν produced by the small-time route
APPROXIMATE_TOLERANCE_FACTOR = float(os.getenv('APPROXIMATE_TOLERANCE_FACTOR', 10.0))

# Allowed drift of a fitted scaling constant when the grid is widened by a decade
SCALING_TOLERANCE = float(os.getenv('SCALING_TOLERANCE', 0.10))

# Chapman-Kolmogorov acceptance: residual <= CHAPMAN_REL_TOL * value + CHAPMAN_ABS_TOL
CHAPMAN_REL_TOL = 1e-4
CHAPMAN_ABS_TOL = 1e-8

# ================================================
# MONTE CARLO
# ================================================
DEFAULT_SEED = int(os.getenv('DEFAULT_SEED', 20140101))
DEFAULT_N_PATHS = int(os.getenv('DEFAULT_N_PATHS', 100000))
DEFAULT_DT = float(os.getenv('DEFAULT_DT', 1e-3))
DEFAULT_MAX_TIME = float(os.getenv('DEFAULT_MAX_TIME', 50.0))
DEFAULT_REFINEMENT = int(os.getenv('DEFAULT_REFINEMENT', 3))

# Paths per counter-based stream block (streams are keyed by (seed, block index))
RNG_BLOCK_SIZE = int(os.getenv('RNG_BLOCK_SIZE', 4096))

# Rejection attempts of the tilted sampler before splitting t in half
TILT_REJECTION_BUDGET = int(os.getenv('TILT_REJECTION_BUDGET', 64))

MAX_WORKERS = int(os.getenv('MAX_WORKERS', 1))

# Maximum tolerated fraction of censored paths
CENSOR_LIMIT = float(os.getenv('CENSOR_LIMIT', 1e-3))

# ================================================
# PATHS
# ================================================
_ROOT = os.path.dirname(os.path.abspath(__file__))
SPECS_DIR = os.getenv('SPECS_DIR', os.path.join(_ROOT, 'specs'))
OUTPUT_DIR = os.getenv('OUTPUT_DIR', 'output')

TOOL_NAME = 'levy-gradient-toolkit'
TOOL_VERSION = '1.0.0'


# ================================================
# VALIDATION
# Ensure numerical settings are usable
# ================================================
def validate_config():
    """Validate that numerical configuration is consistent"""
    errors = []

    if not 0 < GRID_R_MIN < GRID_R_MAX:
        errors.append(f"GRID_R_MIN/GRID_R_MAX must satisfy 0 < min < max, got {GRID_R_MIN}, {GRID_R_MAX}")

    if GRID_POINTS < MIN_PROFILE_POINTS:
        errors.append(f"GRID_POINTS must be at least {MIN_PROFILE_POINTS}, got {GRID_POINTS}")

    if QUAD_ABS_TOL <= 0 or QUAD_REL_TOL <= 0:
        errors.append("QUAD_ABS_TOL and QUAD_REL_TOL must be positive")

    if EULER_LEVELS < 2 or EULER_TERMS <= 2 * EULER_LEVELS:
        errors.append("EULER_TERMS must exceed twice EULER_LEVELS (and EULER_LEVELS >= 2)")

    if CONSTANT_HEADROOM < 1.0:
        errors.append("CONSTANT_HEADROOM must be >= 1")

    if DEFAULT_DT <= 0 or DEFAULT_MAX_TIME <= DEFAULT_DT:
        errors.append("DEFAULT_DT must be positive and smaller than DEFAULT_MAX_TIME")

    if DEFAULT_N_PATHS < 1 or RNG_BLOCK_SIZE < 1:
        errors.append("DEFAULT_N_PATHS and RNG_BLOCK_SIZE must be >= 1")

    if not 0 <= DEFAULT_SEED < 2 ** 64:
        errors.append("DEFAULT_SEED must be a 64-bit unsigned integer")

    if MAX_WORKERS < 1:
        errors.append("MAX_WORKERS must be >= 1")

    if errors:
        raise ValueError("\n".join(errors))


# ================================================
# LOGGING CONFIGURATION
# ================================================
import logging

LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING')  # Only warnings and errors by default

# Verbose logging (checkpoint logs in long CLI runs)
VERBOSE_LOGGING = os.getenv('VERBOSE_LOGGING', 'false').lower() == 'true'


def setup_logging():
    """Setup logging configuration"""
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, LOG_LEVEL.upper(), logging.WARNING)
    )

    return logging.getLogger(__name__)


logger = setup_logging()

# Validate on import
try:
    validate_config()
except ValueError as e:
    # Development convenience: warn, the failing operation will raise later
    logger.warning(f"Configuration validation failed:\n{e}")
