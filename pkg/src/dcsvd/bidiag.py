"""Reduction of a dense m-by-n matrix (m >= n) to upper-bidiagonal form by
two-sided Householder elimination.

The blocked path factors panels of ``block`` columns while accumulating the
column/row reflector products in two interleaved panel matrices
P = [v_1, x_1, ..., v_b, x_b] and Q = [y_1, u_1, ..., y_b, u_b]; the trailing
matrix then takes a single rank-2b update A <- A - P Q^T instead of two
rank-b updates.  Panel vectors are stored full height with explicit zeros
above their pivot rows, so every product is a plain gemv/gemm with no offset
bookkeeping.  The reflector scaling tau_i (pi_i) is folded into the stored
y_i (x_i) columns.
"""

from dataclasses import dataclass

import numpy as np

from .densecore import householder_generate, matmul_accumulate

__all__ = [
    "BidiagonalFactorization",
    "PanelWorkspace",
    "gebrd_blocked",
    "gebrd_unblocked",
    "labrd_panel",
]


@dataclass
class BidiagonalFactorization:
    """Packed result of bidiagonalization A = U1 * B * V1^T.

    ``packed`` holds the essential parts of the column reflectors below the
    diagonal and of the row reflectors right of the superdiagonal;  ``d`` and
    ``e`` are the diagonal and superdiagonal of B; ``tauq``/``taup`` the
    reflector scalars (``taup[-1]`` is always 0: an n-column matrix has only
    n-1 row reflectors).
    """

    packed: np.ndarray
    d: np.ndarray
    e: np.ndarray
    tauq: np.ndarray
    taup: np.ndarray

    @property
    def shape(self):
        return self.packed.shape


@dataclass
class PanelWorkspace:
    """Preallocated P/Q panel storage reused across all panels."""

    p: np.ndarray
    q: np.ndarray

    @classmethod
    def allocate(cls, m, n, block):
        return cls(
            p=np.zeros((m, 2 * block), order="F"),
            q=np.zeros((n, 2 * block), order="F"),
        )


def _require_tall(a):
    m, n = a.shape
    if n < 1:
        raise ValueError("matrix must have at least one column")
    if m < n:
        raise ValueError(f"bidiagonalization requires m >= n, got {m}x{n}")
    return m, n


def gebrd_unblocked(a):
    """Unblocked bidiagonalization, in place on ``a``.

    Reference path: generates each reflector and applies it to the whole
    trailing submatrix immediately.
    """
    m, n = _require_tall(a)
    d = np.zeros(n)
    e = np.zeros(max(n - 1, 0))
    tauq = np.zeros(n)
    taup = np.zeros(n)
    for i in range(n):
        ref = householder_generate(a[i, i], a[i + 1:, i])
        tauq[i] = ref.tau
        d[i] = ref.pivot_value
        a[i, i] = ref.pivot_value
        a[i + 1:, i] = ref.essential
        if ref.tau != 0.0 and i + 1 < n:
            v = np.empty(m - i)
            v[0] = 1.0
            v[1:] = ref.essential
            w = a[i:, i + 1:].T @ v
            a[i:, i + 1:] -= ref.tau * np.outer(v, w)
        if i < n - 1:
            rref = householder_generate(a[i, i + 1], a[i, i + 2:])
            taup[i] = rref.tau
            e[i] = rref.pivot_value
            a[i, i + 1] = rref.pivot_value
            a[i, i + 2:] = rref.essential
            if rref.tau != 0.0:
                u = np.empty(n - i - 1)
                u[0] = 1.0
                u[1:] = rref.essential
                w = a[i + 1:, i + 1:] @ u
                a[i + 1:, i + 1:] -= rref.tau * np.outer(w, u)
    return BidiagonalFactorization(a, d, e, tauq, taup)


def labrd_panel(a, block, work, d, e, tauq, taup):
    """Factor the leading ``block`` rows and columns of the view ``a``.

    Only the panel rows/columns are updated in place; the caller applies the
    accumulated rank-2b update to the trailing matrix.  Requires the view to
    have more than ``block`` columns (a trailing matrix must exist).  Output
    segments are written into d/e/tauq/taup; returns the filled (P, Q) panel
    views.
    """
    m, n = a.shape
    if not 1 <= block < n <= m:
        raise ValueError(
            f"panel width {block} needs block < ncols <= nrows, view is {m}x{n}"
        )
    p = work.p[:m, : 2 * block]
    q = work.q[:n, : 2 * block]
    p[...] = 0.0
    q[...] = 0.0
    for i in range(block):
        # Bring column i up to date with all previous reflector pairs.
        if i > 0:
            a[i:, i] -= p[i:, : 2 * i] @ q[i, : 2 * i]
        ref = householder_generate(a[i, i], a[i + 1:, i])
        tauq[i] = ref.tau
        d[i] = ref.pivot_value
        a[i, i] = ref.pivot_value
        a[i + 1:, i] = ref.essential
        p[i, 2 * i] = 1.0
        p[i + 1:, 2 * i] = ref.essential
        # y_i = tau * A^T v_i - tau * Q (P^T v_i), over the trailing columns
        # the deferred updates have not yet touched.
        if ref.tau != 0.0:
            v = p[i:, 2 * i]
            ytail = a[i:, i + 1:].T @ v
            if i > 0:
                ytail -= q[i + 1:, : 2 * i] @ (p[i:, : 2 * i].T @ v)
            q[i + 1:, 2 * i] = ref.tau * ytail
        # Bring row i up to date, then eliminate it.
        a[i, i + 1:] -= q[i + 1:, : 2 * i + 1] @ p[i, : 2 * i + 1]
        rref = householder_generate(a[i, i + 1], a[i, i + 2:])
        taup[i] = rref.tau
        e[i] = rref.pivot_value
        a[i, i + 1] = rref.pivot_value
        a[i, i + 2:] = rref.essential
        q[i + 1, 2 * i + 1] = 1.0
        q[i + 2:, 2 * i + 1] = rref.essential
        # x_i = pi * A u_i - pi * P (Q^T u_i).
        if rref.tau != 0.0:
            u = q[i + 1:, 2 * i + 1]
            xtail = a[i + 1:, i + 1:] @ u
            xtail -= p[i + 1:, : 2 * i + 1] @ (q[i + 1:, : 2 * i + 1].T @ u)
            p[i + 1:, 2 * i + 1] = rref.tau * xtail
    return p, q


def gebrd_blocked(a, block=32):
    """Blocked bidiagonalization, in place on ``a``.

    Interior panels go through :func:`labrd_panel` followed by one rank-2b
    trailing update; the final (possibly partial) panel, which has no
    trailing matrix, is finished by the unblocked path.
    """
    m, n = _require_tall(a)
    if block < 1:
        raise ValueError(f"block width must be >= 1, got {block}")
    d = np.zeros(n)
    e = np.zeros(max(n - 1, 0))
    tauq = np.zeros(n)
    taup = np.zeros(n)
    work = PanelWorkspace.allocate(m, n, block) if n > block else None
    off = 0
    while n - off > block:
        view = a[off:, off:]
        p, q = labrd_panel(
            view,
            block,
            work,
            d[off:off + block],
            e[off:off + block],
            tauq[off:off + block],
            taup[off:off + block],
        )
        matmul_accumulate(
            -1.0, p[block:, :], False, q[block:, :], True, 1.0, view[block:, block:]
        )
        off += block
    tail = gebrd_unblocked(a[off:, off:])
    d[off:] = tail.d
    e[off:] = tail.e
    tauq[off:] = tail.tauq
    taup[off:] = tail.taup
    return BidiagonalFactorization(a, d, e, tauq, taup)
