"""rdslab: noisy circle maps, random attractors, and a double-gyre basin."""

import os

# Allow more worker threads than cores before numba first reads the env;
# sweep determinism is per-cell, so oversubscription only affects speed.
os.environ.setdefault("NUMBA_NUM_THREADS", "16")
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

__version__ = "0.1.0"
