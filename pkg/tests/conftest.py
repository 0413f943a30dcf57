"""Shared test configuration.

Thread counts are pinned before numpy (and its BLAS) load so timing-based
checks and bit-reproducibility comparisons run under one fixed
configuration.
"""

import os

for _var in (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
):
    os.environ.setdefault(_var, "1")
