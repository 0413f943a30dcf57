"""Independent reference implementations used to check the library.

Everything in this module is deliberately naive: dense matrices, explicit
loops, no shared code with ``dcsvd``.  These oracles were written (and their
frozen outputs recorded) before the library existed, so tests compare the
fast structured code against slow-but-obvious math.
"""

import numpy as np

EPS = np.finfo(np.float64).eps


def matmul_reference(alpha, a, trans_a, b, trans_b, beta, c):
    """Triple-loop C <- beta*C + alpha*op(A)op(B).  Returns a new array."""
    opa = a.T if trans_a else a
    opb = b.T if trans_b else b
    m, k = opa.shape
    k2, n = opb.shape
    assert k == k2
    out = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            s = 0.0
            for p in range(k):
                s += opa[i, p] * opb[p, j]
            out[i, j] = beta * c[i, j] + alpha * s
    return out


def reflector_matrix(n, offset, tau, essential):
    """Dense n-by-n Householder matrix I - tau*y*y^T.

    The reflector vector y has zeros in rows < offset, a unit entry at row
    ``offset`` and ``essential`` below it.
    """
    y = np.zeros(n)
    y[offset] = 1.0
    y[offset + 1:offset + 1 + len(essential)] = essential
    return np.eye(n) - tau * np.outer(y, y)


def reflector_product(n, reflectors):
    """Dense product H_1 H_2 ... H_k of (offset, tau, essential) triples."""
    q = np.eye(n)
    for offset, tau, essential in reflectors:
        q = q @ reflector_matrix(n, offset, tau, essential)
    return q


def t_forward_recursion(y, tau):
    """Upper-triangular T with H_1...H_b = I - Y T Y^T, built column by column.

    T_i = [[T_{i-1}, -tau_i * T_{i-1} (Y_{i-1}^T y_i)], [0, tau_i]].
    """
    b = len(tau)
    t = np.zeros((b, b))
    for i in range(b):
        t[i, i] = tau[i]
        if i > 0:
            t[:i, i] = -tau[i] * (t[:i, :i] @ (y[:, :i].T @ y[:, i]))
    return t


def bidiagonal_dense(d, e, bordered=False):
    """Dense upper-bidiagonal matrix from its diagonal and superdiagonal.

    Square n-by-n uses e[0..n-2]; bordered n-by-(n+1) uses all n entries of e,
    with e[n-1] in the trailing extra column.
    """
    n = len(d)
    cols = n + 1 if bordered else n
    b = np.zeros((n, cols))
    for i in range(n):
        b[i, i] = d[i]
        if i + 1 < cols:
            b[i, i + 1] = e[i]
    return b


def middle_matrix(d, z):
    """Dense N-by-N merge matrix: first row z, diagonal d (d[0] = 0)."""
    m = np.diag(np.asarray(d, dtype=float).copy())
    m[0, :] = z
    return m


def secular_value(d, z, omega_sq):
    """f(omega) = 1 + sum z_j^2 / (d_j^2 - omega^2), evaluated naively."""
    return 1.0 + np.sum(np.asarray(z) ** 2 / (np.asarray(d) ** 2 - omega_sq))


def jacobi_singular_values(a, max_sweeps=60):
    """Singular values of ``a`` by cyclic one-sided Jacobi on A^T A.

    Columns of a working copy are rotated pairwise until every off-diagonal
    Gram entry a_i^T a_j is negligible against its diagonal neighbors; the
    singular values are then the column norms.  Completely independent of the
    library under test (and of LAPACK's drivers).
    """
    g = np.array(a, dtype=np.float64, copy=True)
    m, n = g.shape
    if m < n:
        g = g.T.copy()
        m, n = g.shape
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                gii = g[:, i] @ g[:, i]
                gjj = g[:, j] @ g[:, j]
                gij = g[:, i] @ g[:, j]
                if abs(gij) <= 0.5 * EPS * np.sqrt(gii * gjj):
                    continue
                rotated = True
                # Two-sided Jacobi rotation of the 2x2 Gram block, applied
                # one-sidedly to the columns of g.
                zeta = (gjj - gii) / (2.0 * gij)
                t = np.sign(zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                if zeta == 0.0:
                    t = 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                gi = g[:, i].copy()
                g[:, i] = c * gi - s * g[:, j]
                g[:, j] = s * gi + c * g[:, j]
        if not rotated:
            break
    sigma = np.sqrt(np.sum(g * g, axis=0))
    return np.sort(sigma)[::-1]


def svd_values_oracle(a):
    """Descending singular values via the platform LAPACK (independent path)."""
    return np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
