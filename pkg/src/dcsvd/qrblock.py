"""Blocked Householder QR with compact-WY block reflectors.

A block of reflectors H_1...H_b = I - Y T Y^T is represented through the
*inverse* of its triangular factor: Tinv = strict upper triangle of Y^T Y
with diagonal 1/tau_i.  Building Tinv is a single syrk-like product instead
of the column-by-column forward recursion for T, and applications replace
the small triangular multiply by a triangular solve.  All block applications
are matrix-matrix products; no matrix-vector kernels touch the critical
path.
"""

from dataclasses import dataclass

import numpy as np

from .densecore import householder_generate, matmul_accumulate, triangular_solve

__all__ = [
    "CompactWYBlock",
    "QRFactorization",
    "apply_block_reflector_left",
    "apply_block_reflector_right",
    "build_tinv",
    "geqrf_blocked",
    "geqrf_panel",
    "orgqr",
]


@dataclass
class QRFactorization:
    """Packed blocked-QR result: R in the upper triangle of ``packed``,
    reflector essentials below the diagonal, scalars in ``tau``."""

    packed: np.ndarray
    tau: np.ndarray

    @property
    def shape(self):
        return self.packed.shape


@dataclass
class CompactWYBlock:
    """One reflector block (Y, Tinv) with H_1...H_b = I - Y Tinv^-1 Y^T."""

    y: np.ndarray
    tinv: np.ndarray


def geqrf_panel(a, tau):
    """Unblocked QR of the panel view ``a``, in place.

    Each column yields one reflector; the essentials overwrite the
    subdiagonal part, R the upper triangle.  ``tau`` receives the scalars.
    """
    m, n = a.shape
    if m < n:
        raise ValueError(f"panel must be tall, got {m}x{n}")
    for j in range(n):
        ref = householder_generate(a[j, j], a[j + 1:, j])
        tau[j] = ref.tau
        a[j, j] = ref.pivot_value
        a[j + 1:, j] = ref.essential
        if ref.tau != 0.0 and j + 1 < n:
            v = np.empty(m - j)
            v[0] = 1.0
            v[1:] = ref.essential
            w = a[j:, j + 1:].T @ v
            a[j:, j + 1:] -= ref.tau * np.outer(v, w)
    return a


def _panel_y(packed, tau):
    """Unit-lower-trapezoidal Y read out of packed reflector storage.

    Columns whose tau is 0 encode skipped reflectors and are zeroed, which
    makes the corresponding row/column of the block act as the identity.
    """
    m, b = packed.shape
    y = np.zeros((m, b), order="F")
    for j in range(b):
        if tau[j] == 0.0:
            continue
        y[j, j] = 1.0
        y[j + 1:, j] = packed[j + 1:, j]
    return y


def build_tinv(y, tau):
    """Inverse triangular factor of the block reflector for Y and tau.

    Strict upper triangle of Y^T Y, diagonal 1/tau_i (1 for skipped
    reflectors, whose Y columns must be zero).
    """
    b = y.shape[1]
    tinv = np.triu(y.T @ y, k=1)
    for i in range(b):
        tinv[i, i] = 1.0 / tau[i] if tau[i] != 0.0 else 1.0
    return np.asfortranarray(tinv)


def apply_block_reflector_left(block, c, transpose=False):
    """C <- (I - Y T Y^T) C, or the transposed block when ``transpose``.

    Two gemms around one small triangular solve (T Z = Tinv^-1 Z).
    """
    z = block.y.T @ c
    triangular_solve(block.tinv, z, side="left", trans=transpose)
    matmul_accumulate(-1.0, block.y, False, z, False, 1.0, c)
    return c


def apply_block_reflector_right(block, c, transpose=False):
    """C <- C (I - Y T Y^T), or the transposed block when ``transpose``."""
    z = c @ block.y
    triangular_solve(block.tinv, z, side="right", trans=transpose)
    matmul_accumulate(-1.0, z, False, block.y, True, 1.0, c)
    return c


def geqrf_blocked(a, block=32):
    """Blocked QR factorization, in place on ``a``.

    Panels are factored unblocked; each trailing matrix takes the block
    reflector transposed (the product H_b...H_1 that QR applies).
    """
    m, n = a.shape
    if n < 1:
        raise ValueError("matrix must have at least one column")
    if m < n:
        raise ValueError(f"QR factorization requires m >= n, got {m}x{n}")
    if block < 1:
        raise ValueError(f"block width must be >= 1, got {block}")
    tau = np.zeros(n)
    for off in range(0, n, block):
        w = min(block, n - off)
        panel = a[off:, off:off + w]
        geqrf_panel(panel, tau[off:off + w])
        if off + w < n:
            y = _panel_y(panel, tau[off:off + w])
            blk = CompactWYBlock(y, build_tinv(y, tau[off:off + w]))
            apply_block_reflector_left(blk, a[off:, off + w:], transpose=True)
    return QRFactorization(a, tau)


def orgqr(fact, k, block=64):
    """First ``k`` columns of Q = H_1...H_n from a packed QR factorization.

    Blocks are rebuilt (Tinv recomputed from the stored essentials) and
    applied back to front against an identity slab.
    """
    m, n = fact.packed.shape
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= {m} columns of Q, got {k}")
    q = np.zeros((m, k), order="F")
    np.fill_diagonal(q, 1.0)
    starts = list(range(0, n, block))
    for off in reversed(starts):
        w = min(block, n - off)
        y = _panel_y(fact.packed[off:, off:off + w], fact.tau[off:off + w])
        blk = CompactWYBlock(y, build_tinv(y, fact.tau[off:off + w]))
        apply_block_reflector_left(blk, q[off:, :], transpose=False)
    return q
