"""Dense SVD by blocked bidiagonalization and bidiagonal divide-and-conquer.

The public surface mirrors the computation pipeline:

- :mod:`dcsvd.densecore` — column-major storage and kernel operations,
- :mod:`dcsvd.bidiag` — merged rank-2b blocked bidiagonalization,
- :mod:`dcsvd.qrblock` — blocked Householder QR with inverse-T compact-WY
  block reflectors,
- :mod:`dcsvd.bdc` — bidiagonal divide-and-conquer (deflation, secular
  roots, structured vector merges),
- :mod:`dcsvd.backtransform` — applying stored reflector sequences to the
  divide-and-conquer vectors,
- :mod:`dcsvd.driver` — the end-to-end ``gesdd`` driver and phase profiler,
- :mod:`dcsvd.harness` — test-matrix generators, accuracy metrics, the DSVD
  file format and the command-line interface.
"""

from .backtransform import ReflectorSequence, column_reflectors, ormlq_like, ormqr_like, row_reflectors
from .bdc import (
    BidiagonalProblem,
    DeflationOutcome,
    SecularRoots,
    SecularSystem,
    SubproblemSVD,
    bdsdc,
    bdsqr_base,
    build_z,
    deflate,
    merge_vectors,
    recompute_z,
    secular_vectors,
    solve_all_roots,
    solve_secular,
    split,
)
from .bidiag import BidiagonalFactorization, gebrd_blocked, gebrd_unblocked, labrd_panel
from .densecore import (
    ConvergenceError,
    GivensRotation,
    HouseholderReflector,
    as_dense,
    dense_matrix,
    givens_generate,
    householder_generate,
    matmul_accumulate,
    matvec_accumulate,
    triangular_solve,
)
from .driver import PhaseProfile, SVDOptions, SVDResult, gesdd, phase_profile
from .harness import (
    AccuracyReport,
    MatrixSpec,
    accuracy,
    cli_main,
    generate_matrix,
    prescribed_singular_values,
    read_matrix,
    write_matrix,
)
from .qrblock import (
    CompactWYBlock,
    QRFactorization,
    apply_block_reflector_left,
    apply_block_reflector_right,
    build_tinv,
    geqrf_blocked,
    geqrf_panel,
    orgqr,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "BidiagonalFactorization",
    "BidiagonalProblem",
    "CompactWYBlock",
    "ConvergenceError",
    "DeflationOutcome",
    "GivensRotation",
    "HouseholderReflector",
    "MatrixSpec",
    "PhaseProfile",
    "QRFactorization",
    "ReflectorSequence",
    "SVDOptions",
    "SVDResult",
    "SecularRoots",
    "SecularSystem",
    "SubproblemSVD",
    "accuracy",
    "apply_block_reflector_left",
    "apply_block_reflector_right",
    "as_dense",
    "bdsdc",
    "bdsqr_base",
    "build_tinv",
    "build_z",
    "cli_main",
    "column_reflectors",
    "deflate",
    "dense_matrix",
    "gebrd_blocked",
    "gebrd_unblocked",
    "generate_matrix",
    "geqrf_blocked",
    "geqrf_panel",
    "gesdd",
    "givens_generate",
    "householder_generate",
    "labrd_panel",
    "matmul_accumulate",
    "matvec_accumulate",
    "merge_vectors",
    "orgqr",
    "ormlq_like",
    "ormqr_like",
    "phase_profile",
    "prescribed_singular_values",
    "read_matrix",
    "recompute_z",
    "row_reflectors",
    "secular_vectors",
    "solve_all_roots",
    "solve_secular",
    "split",
    "triangular_solve",
    "write_matrix",
]
