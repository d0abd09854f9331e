# src/config.py
import os

# Numerical tolerances shared by every module
NORMALIZATION_TOLERANCE = 1e-10
SINGULAR_GRAM_CONDITION = 1e12
PERIOD_EQUALITY_TOLERANCE = 1e-8
SUPPORT_REL_THRESHOLD = 1e-6

# Basis pursuit (operator splitting) settings
BP_TOLERANCE = 1e-9
BP_PENALTY = 1.0
BP_MAX_ITERATIONS = 50_000

# OMP re-solves from scratch every this many iterations
OMP_REFACTOR_INTERVAL = 10

# Numeric output everywhere (CSV, stdout)
SIGNIFICANT_DIGITS = 12
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"

DEFAULT_SEED = 20240601
DEFAULT_FAMILY = "rpt"
DEFAULT_P_MAX = 20
DEFAULT_LENGTH = 100

ROOT_PATH = os.path.dirname(os.path.dirname(__file__))
DEFAULT_OUTPUT_DIR = os.path.join(ROOT_PATH, "results")

DATABASE_NAME = "experiments.db"
DATABASE_PATH = os.path.join(ROOT_PATH, "database", DATABASE_NAME)
