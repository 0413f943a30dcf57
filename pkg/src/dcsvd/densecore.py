"""Column-major dense-matrix core: storage helpers and the kernel operations
every higher-level factorization is built from.

Matrices are float64 numpy arrays in Fortran (column-major) order; a slice
``a[i:, j:]`` is a zero-copy panel view sharing the parent's leading
dimension, which is what the blocked algorithms rely on.
"""

from dataclasses import dataclass

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import solve_triangular

__all__ = [
    "ConvergenceError",
    "GivensRotation",
    "HouseholderReflector",
    "dense_matrix",
    "as_dense",
    "givens_generate",
    "householder_generate",
    "matmul_accumulate",
    "matvec_accumulate",
    "triangular_solve",
]


class ConvergenceError(RuntimeError):
    """An iterative kernel exceeded its iteration budget."""


@dataclass
class HouseholderReflector:
    """Elementary reflector H = I - tau * y y^T with y = (1, essential).

    ``tau == 0`` encodes the identity (nothing to eliminate); ``pivot_value``
    is the value the pivot entry is mapped to.
    """

    tau: float
    essential: np.ndarray
    pivot_value: float


@dataclass
class GivensRotation:
    """Plane rotation [[c, s], [-s, c]] with c^2 + s^2 = 1."""

    c: float
    s: float


def dense_matrix(m, n):
    """Zero-initialized m-by-n column-major matrix."""
    if m < 0 or n < 0:
        raise ValueError(f"matrix dimensions must be nonnegative, got {m}x{n}")
    return np.zeros((m, n), dtype=np.float64, order="F")


def as_dense(a):
    """Copy of ``a`` as a float64 column-major matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
    return np.asfortranarray(a).copy(order="F")


def _op_shape(a, trans):
    return (a.shape[1], a.shape[0]) if trans else a.shape


def matmul_accumulate(alpha, a, trans_a, b, trans_b, beta, c):
    """C <- beta*C + alpha*op(A) op(B), written in place into ``c``.

    ``beta == 0`` overwrites C without reading it.  Raises ValueError on
    non-conforming shapes.
    """
    ma, ka = _op_shape(a, trans_a)
    kb, nb = _op_shape(b, trans_b)
    if ka != kb or c.shape != (ma, nb):
        raise ValueError(
            f"matmul_accumulate shape mismatch: op(A)={ma}x{ka}, "
            f"op(B)={kb}x{nb}, C={c.shape[0]}x{c.shape[1]}"
        )
    prod = (a.T if trans_a else a) @ (b.T if trans_b else b)
    if beta == 0.0:
        c[...] = alpha * prod
    else:
        if beta != 1.0:
            c *= beta
        c += alpha * prod
    return c


def matvec_accumulate(alpha, a, trans_a, x, beta, y):
    """y <- beta*y + alpha*op(A) x, written in place into ``y``."""
    ma, ka = _op_shape(a, trans_a)
    if x.shape != (ka,) or y.shape != (ma,):
        raise ValueError(
            f"matvec_accumulate shape mismatch: op(A)={ma}x{ka}, "
            f"x={x.shape}, y={y.shape}"
        )
    prod = (a.T if trans_a else a) @ x
    if beta == 0.0:
        y[...] = alpha * prod
    else:
        if beta != 1.0:
            y *= beta
        y += alpha * prod
    return y


def householder_generate(alpha, x):
    """Reflector mapping the vector (alpha, x) onto (pivot_value, 0, ..., 0).

    The pivot is -sign(alpha)*||(alpha, x)||_2, so the elimination never
    cancels.  A zero tail yields tau = 0 (identity), keeping the pivot as is
    rather than flipping its sign.
    """
    x = np.asarray(x, dtype=np.float64)
    norm_tail = np.linalg.norm(x)
    if norm_tail == 0.0:
        return HouseholderReflector(0.0, x.copy(), float(alpha))
    beta = -np.copysign(np.hypot(alpha, norm_tail), alpha)
    tau = (beta - alpha) / beta
    essential = x / (alpha - beta)
    return HouseholderReflector(float(tau), essential, float(beta))


def givens_generate(a, b):
    """Rotation with c*a + s*b = r >= 0 and -s*a + c*b = 0.

    Returns (GivensRotation, r).  (a, b) = (0, 0) yields the identity with
    r = 0.
    """
    r = np.hypot(a, b)
    if r == 0.0:
        return GivensRotation(1.0, 0.0), 0.0
    return GivensRotation(a / r, b / r), float(r)


def triangular_solve(t, b, side="left", trans=False):
    """Solve against an upper-triangular T in place on ``b``.

    side='left'  : B <- T^-1 B   (or T^-T B when trans)
    side='right' : B <- B T^-1   (or B T^-T when trans)
    Raises LinAlgError on a zero diagonal.
    """
    if t.shape[0] != t.shape[1]:
        raise ValueError(f"triangular factor must be square, got {t.shape}")
    if np.any(np.diag(t) == 0.0):
        raise LinAlgError("triangular factor has a zero diagonal entry")
    if side == "left":
        if b.shape[0] != t.shape[0]:
            raise ValueError(
                f"shape mismatch: T is {t.shape}, B has {b.shape[0]} rows"
            )
        b[...] = solve_triangular(t, b, lower=False, trans="T" if trans else "N")
    elif side == "right":
        if b.shape[1] != t.shape[0]:
            raise ValueError(
                f"shape mismatch: T is {t.shape}, B has {b.shape[1]} columns"
            )
        # B T^-1 = (T^-T B^T)^T and B T^-T = (T^-1 B^T)^T.
        b[...] = solve_triangular(
            t, b.T, lower=False, trans="N" if trans else "T"
        ).T
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return b
