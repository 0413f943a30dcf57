"""End-to-end dense SVD driver.

Wide matrices are handled by transposition.  Tall-skinny matrices (m at
least ``ts_crossover`` times n) take a QR-first path — factor, reduce the
n-by-n triangle, then one gemm recovers the left vectors — which trades the
expensive two-sided reduction of a tall matrix for a cheap one-sided QR.
Everything else goes straight to bidiagonalization, divide-and-conquer, and
the blocked back-transformations.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .backtransform import column_reflectors, ormlq_like, ormqr_like, row_reflectors
from .bdc import BidiagonalProblem, bdsdc
from .bidiag import gebrd_blocked
from .qrblock import geqrf_blocked, orgqr

__all__ = [
    "PHASE_NAMES",
    "PhaseProfile",
    "SVDOptions",
    "SVDResult",
    "gesdd",
    "phase_profile",
]

PHASE_NAMES = ("geqrf", "orgqr", "gebrd", "bdcdc", "ormqr+ormlq", "gemm")


@dataclass
class SVDOptions:
    """Tuning knobs for :func:`gesdd`.

    ``want_vectors`` False computes singular values only.  Block widths
    control panel sizes of the individual stages; ``leaf_size`` is the
    divide-and-conquer base-case bound; ``ts_crossover`` the m/n ratio at
    which the QR-first path switches on; ``deflation_multiple`` scales the
    deflation tolerance.
    """

    want_vectors: bool = True
    bidiag_block: int = 32
    qr_block: int = 32
    orgqr_block: int = 64
    apply_block: int = 64
    leaf_size: int = 32
    ts_crossover: float = 5.0 / 3.0
    deflation_multiple: float = 8.0

    def __post_init__(self):
        for name in ("bidiag_block", "qr_block", "orgqr_block", "apply_block", "leaf_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.ts_crossover >= 1.0:
            raise ValueError(f"ts_crossover must be >= 1, got {self.ts_crossover}")
        if not self.deflation_multiple > 0.0:
            raise ValueError(
                f"deflation_multiple must be > 0, got {self.deflation_multiple}"
            )


@dataclass
class SVDResult:
    """sigma descending; economy factors U (m x k) and Vt (k x n), or None
    for a values-only run (k = min(m, n))."""

    sigma: np.ndarray
    u: np.ndarray | None
    vt: np.ndarray | None


@dataclass
class PhaseProfile:
    """Per-phase wall times, one entry per name in :data:`PHASE_NAMES`
    (phases that did not run record 0.0), plus the driver total."""

    phases: list
    total: float


@contextmanager
def _phase(prof, name):
    if prof is None:
        yield
        return
    t0 = time.perf_counter()
    try:
        yield
    finally:
        prof[name] += time.perf_counter() - t0


def _square_core(a, opts, prof):
    """SVD of an m x n (m >= n) matrix without the QR-first detour.
    ``a`` is consumed as workspace."""
    m, n = a.shape
    with _phase(prof, "gebrd"):
        fact = gebrd_blocked(a, opts.bidiag_block)
    with _phase(prof, "bdcdc"):
        sub = bdsdc(
            BidiagonalProblem(fact.d, fact.e, bordered=False),
            want_vectors=opts.want_vectors,
            leaf=opts.leaf_size,
            tol_multiple=opts.deflation_multiple,
        )
    if not opts.want_vectors:
        return SVDResult(sub.dvals, None, None)
    with _phase(prof, "ormqr+ormlq"):
        u = np.zeros((m, n), order="F")
        u[:n, :] = sub.w
        ormqr_like(column_reflectors(fact), u, transpose=False, block=opts.apply_block)
        vt = np.asfortranarray(sub.qfull.T)
        ormlq_like(row_reflectors(fact), vt, transpose=True, block=opts.apply_block)
    return SVDResult(sub.dvals, u, vt)


def _gesdd_impl(a, opts, prof):
    m, n = a.shape
    if m < 1 or n < 1:
        raise ValueError(f"matrix must be nonempty, got {m}x{n}")
    if m < n:
        res = _gesdd_impl(np.asfortranarray(a.T), opts, prof)
        return SVDResult(
            res.sigma,
            None if res.vt is None else np.asfortranarray(res.vt.T),
            None if res.u is None else np.asfortranarray(res.u.T),
        )
    if m >= opts.ts_crossover * n and m > n:
        with _phase(prof, "geqrf"):
            qr = geqrf_blocked(a, opts.qr_block)
            r = np.asfortranarray(np.triu(qr.packed[:n, :]))
        core = _square_core(r, opts, prof)
        if not opts.want_vectors:
            return core
        with _phase(prof, "orgqr"):
            q = orgqr(qr, n, opts.orgqr_block)
        with _phase(prof, "gemm"):
            u = np.asfortranarray(q @ core.u)
        return SVDResult(core.sigma, u, core.vt)
    return _square_core(a, opts, prof)


def gesdd(a, options=None):
    """Economy SVD of a dense matrix: A = U diag(sigma) Vt.

    Returns sigma descending and, unless ``options.want_vectors`` is False,
    the economy factors.  The input is not modified.
    """
    opts = options if options is not None else SVDOptions()
    a = np.array(a, dtype=np.float64, order="F", copy=True)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
    return _gesdd_impl(a, opts, None)


def phase_profile(a, options=None):
    """Run :func:`gesdd` with wall-time attribution per pipeline phase."""
    opts = options if options is not None else SVDOptions()
    a = np.array(a, dtype=np.float64, order="F", copy=True)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
    prof = {name: 0.0 for name in PHASE_NAMES}
    t0 = time.perf_counter()
    _gesdd_impl(a, opts, prof)
    total = time.perf_counter() - t0
    return PhaseProfile([(name, prof[name]) for name in PHASE_NAMES], total)
