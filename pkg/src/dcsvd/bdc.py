"""Singular value decomposition of upper-bidiagonal matrices by divide and
conquer.

A problem is either square (n x n) or *bordered* (n x (n+1), carrying one
extra trailing column); splitting removes a middle row, producing a bordered
left child and a right child bordered iff the parent is.  Each merge
expresses the removed row in the children's right bases, rotates the two
column-space null directions together, deflates negligible entries, solves
the secular equation for the surviving spectrum, rebuilds the update vector
from the computed roots so singular vectors come out orthogonal without
reorthogonalization, and assembles the node's vectors with three structured
matrix products per side.  Base cases use implicit-shift QR iteration.

Internally singular values are kept ascending (the order the secular system
needs); the public :func:`bdsdc` entry point returns them descending.

Values-only runs must produce bitwise the same values as with-vectors runs,
so the quantities the values depend on — the first and last rows of every
node's right basis, which feed the next merge's z vector — are propagated
through a dedicated two-row companion (``edge_rows``) in *both* modes rather
than sliced out of the full vector matrices.
"""

from dataclasses import dataclass

import numpy as np

from .densecore import ConvergenceError, givens_generate

EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny

__all__ = [
    "BidiagonalProblem",
    "DeflationOutcome",
    "SecularRoots",
    "SecularSystem",
    "SubproblemSVD",
    "bdsdc",
    "bdsqr_base",
    "build_z",
    "deflate",
    "merge_vectors",
    "recompute_z",
    "secular_vectors",
    "solve_all_roots",
    "solve_secular",
    "split",
]


# ---------------------------------------------------------------------------
# problem / result containers


@dataclass
class BidiagonalProblem:
    """Upper-bidiagonal matrix: diagonal ``d``, superdiagonal ``e``.

    ``e`` always has n entries; e[n-1] is meaningful only when ``bordered``
    (the matrix is then n x (n+1) with e[n-1] in the extra trailing column).
    """

    d: np.ndarray
    e: np.ndarray
    bordered: bool = False

    def __post_init__(self):
        self.d = np.atleast_1d(np.asarray(self.d, dtype=np.float64))
        e = np.atleast_1d(np.asarray(self.e, dtype=np.float64))
        n = self.d.size
        if n and e.size == n - 1:
            e = np.append(e, 0.0)
        if e.size != n:
            raise ValueError(
                f"superdiagonal must have {max(n - 1, 0)} or {n} entries, "
                f"got {e.size}"
            )
        self.e = e

    @property
    def n(self):
        return self.d.size

    @property
    def ncols(self):
        return self.d.size + (1 if self.bordered else 0)

    def dense(self):
        """Dense realization (for tests and small oracles)."""
        b = np.zeros((self.n, self.ncols))
        for i in range(self.n):
            b[i, i] = self.d[i]
            if i + 1 < self.ncols:
                b[i, i + 1] = self.e[i]
        return b


@dataclass
class SubproblemSVD:
    """SVD of one (sub)problem: B = W diag(dvals) [Q | q]^T.

    ``qfull`` is the full right basis (ncols x ncols); when the problem is
    bordered its last column is the null-space direction that pairs with no
    singular value.  ``edge_rows`` holds the first and last row of ``qfull``
    and is maintained even in values-only mode (``w``/``qfull`` None), since
    parent merges need exactly those rows.
    """

    dvals: np.ndarray
    w: np.ndarray | None
    qfull: np.ndarray | None
    edge_rows: np.ndarray

    @property
    def n(self):
        return self.dvals.size


@dataclass
class SecularSystem:
    """Surviving entries after deflation: f(w) = 1 + sum z_j^2/(d_j^2 - w^2).

    ``d`` ascending with d[0] = 0 and gaps above the deflation tolerance;
    every |z| above it.  ``norm_bound`` = sqrt(d[-1]^2 + ||z||^2) bounds the
    spectral norm of the implied middle matrix.
    """

    d: np.ndarray
    z: np.ndarray
    norm_bound: float

    @property
    def n(self):
        return self.d.size


@dataclass
class SecularRoots:
    """Secular roots kept in cancellation-free form.

    omega[i] lies strictly between its bracketing poles; it is stored as the
    anchor pole index plus the offset mu = omega^2 - d[anchor]^2, which is
    what every downstream difference d_j^2 - omega^2 is computed from.
    """

    omega: np.ndarray
    anchor: np.ndarray
    mu: np.ndarray


@dataclass
class DeflationOutcome:
    """Deflation bookkeeping for one merge, in sorted working order.

    ``kept``/``deflated`` index the sorted (d, z); ``applied_rotations``
    lists (i, j, rotation) for close-pair eliminations, already applied to
    whichever vector columns were supplied.  ``permutation`` maps working
    order back to the caller's pre-sort order.  ``d``/``z`` are the working
    copies after all rotations.
    """

    system: SecularSystem
    kept: np.ndarray
    deflated: np.ndarray
    deflated_values: np.ndarray
    applied_rotations: list
    permutation: np.ndarray
    d: np.ndarray
    z: np.ndarray


# column classes used by the structured merge products
_CLASS_UNIT = 0    # unit column on the removed middle row (left side only)
_CLASS_FIRST = 1   # support inside the first child's block only
_CLASS_SECOND = 2  # support inside the second child's block only
_CLASS_MIXED = 3   # support across both blocks (cross-child rotations, z col)


def _mix_columns(mats, p, q, c, s):
    """Apply the rotation [[c, s], [-s, c]] to columns p, q of each matrix."""
    for m in mats:
        if m is None:
            continue
        tmp = c * m[:, p] + s * m[:, q]
        m[:, q] = -s * m[:, p] + c * m[:, q]
        m[:, p] = tmp


def _permute_columns(mats, perm):
    for m in mats:
        if m is None:
            continue
        m[:, : perm.size] = m[:, perm]


# ---------------------------------------------------------------------------
# base case: implicit-shift QR iteration


def _negligible(x, a, b, bnorm):
    return abs(x) <= EPS * (abs(a) + abs(b)) or abs(x) <= EPS * bnorm * 1e-3


def _qr_sweep_shift(d, e, lo, hi):
    """Wilkinson shift from the trailing 2x2 block of B^T B."""
    e2 = e[hi - 2] if hi - 2 >= lo else 0.0
    t11 = d[hi - 1] * d[hi - 1] + e2 * e2
    t12 = d[hi - 1] * e[hi - 1]
    t22 = d[hi] * d[hi] + e[hi - 1] * e[hi - 1]
    delta = 0.5 * (t11 - t22)
    denom = delta + np.copysign(np.hypot(delta, t12), delta if delta != 0.0 else 1.0)
    if denom == 0.0:
        return t22
    return t22 - t12 * t12 / denom


def _qr_step(d, e, lo, hi, left_mats, right_mats):
    """One implicit-shift bulge chase over the unreduced block [lo, hi]."""
    mu = _qr_sweep_shift(d, e, lo, hi)
    f = d[lo] * d[lo] - mu
    g = d[lo] * e[lo]
    for k in range(lo, hi):
        rot, r = givens_generate(f, g)
        c, s = rot.c, rot.s
        if k > lo:
            e[k - 1] = r
        dk, ek = d[k], e[k]
        f = c * dk + s * ek
        e[k] = c * ek - s * dk
        g = s * d[k + 1]
        d[k + 1] = c * d[k + 1]
        _mix_columns(right_mats, k, k + 1, c, s)
        rot, r = givens_generate(f, g)
        c, s = rot.c, rot.s
        d[k] = r
        ek, dk1 = e[k], d[k + 1]
        f = c * ek + s * dk1
        d[k + 1] = c * dk1 - s * ek
        if k < hi - 1:
            g = s * e[k + 1]
            e[k + 1] = c * e[k + 1]
        _mix_columns(left_mats, k, k + 1, c, s)
    e[hi - 1] = f


def _chase_zero_row(d, e, k, hi, left_mats):
    """d[k] ~ 0 with k < hi: rotate the k-th row's coupling down and out."""
    f = e[k]
    e[k] = 0.0
    for j in range(k + 1, hi + 1):
        rot, r = givens_generate(d[j], f)
        d[j] = r
        if j < hi:
            f = -rot.s * e[j]
            e[j] = rot.c * e[j]
        _mix_columns(left_mats, j, k, rot.c, rot.s)


def _chase_zero_col(d, e, hi, lo, right_mats):
    """d[hi] ~ 0: rotate the last column's coupling up and out."""
    f = e[hi - 1]
    e[hi - 1] = 0.0
    for j in range(hi - 1, lo - 1, -1):
        rot, r = givens_generate(d[j], f)
        d[j] = r
        if j > lo:
            f = -rot.s * e[j - 1]
            e[j - 1] = rot.c * e[j - 1]
        _mix_columns(right_mats, j, hi, rot.c, rot.s)


def _qr_iteration(d, e, left_mats, right_mats):
    """Diagonalize the square bidiagonal (d, e) in place, accumulating
    rotations into the supplied column sets."""
    n = d.size
    if n == 0:
        return
    bnorm = max(np.max(np.abs(d)), np.max(np.abs(e)) if e.size else 0.0)
    if bnorm == 0.0:
        return
    budget = 60 * n * max(n, 4)
    steps = 0
    hi = n - 1
    while hi > 0:
        if _negligible(e[hi - 1], d[hi - 1], d[hi], bnorm):
            e[hi - 1] = 0.0
            hi -= 1
            continue
        lo = hi - 1
        while lo > 0 and not _negligible(e[lo - 1], d[lo - 1], d[lo], bnorm):
            lo -= 1
        if lo > 0:
            e[lo - 1] = 0.0
        zeroed = False
        for k in range(lo, hi + 1):
            if abs(d[k]) <= EPS * bnorm * 1e-3:
                d[k] = 0.0
                if k < hi:
                    _chase_zero_row(d, e, k, hi, left_mats)
                else:
                    _chase_zero_col(d, e, hi, lo, right_mats)
                zeroed = True
                break
        if zeroed:
            continue
        _qr_step(d, e, lo, hi, left_mats, right_mats)
        steps += hi - lo
        if steps > budget:
            raise ConvergenceError(
                f"bidiagonal QR iteration exceeded {budget} rotations (n={n})"
            )


def bdsqr_base(prob, want_vectors=True):
    """SVD of a bidiagonal problem by QR iteration.

    Bordered problems first chase the trailing column into the square part
    with one rotation chain.  Values come back ascending and non-negative;
    sign fixes go into the left vectors so the right basis (and its
    ``edge_rows``) is untouched by them.
    """
    n = prob.n
    ncols = prob.ncols
    edge = np.zeros((2, ncols))
    if ncols:
        edge[0, 0] = 1.0
        edge[1, ncols - 1] = 1.0
    w = np.eye(n, order="F") if want_vectors else None
    qfull = np.eye(ncols, order="F") if want_vectors else None
    if n == 0:
        return SubproblemSVD(np.zeros(0), w, qfull, edge)
    d = prob.d.copy()
    e = prob.e[: n - 1].copy()
    left_mats = [w] if want_vectors else []
    right_mats = [qfull, edge] if want_vectors else [edge]
    if prob.bordered:
        f = prob.e[n - 1]
        for i in range(n - 1, -1, -1):
            rot, r = givens_generate(d[i], f)
            d[i] = r
            if i > 0:
                f = -rot.s * e[i - 1]
                e[i - 1] = rot.c * e[i - 1]
            _mix_columns(right_mats, i, n, rot.c, rot.s)
            if rot.s == 0.0:
                break
    _qr_iteration(d, e, left_mats, right_mats)
    for i in range(n):
        if d[i] < 0.0:
            d[i] = -d[i]
            if want_vectors:
                w[:, i] = -w[:, i]
    order = np.argsort(d, kind="stable")
    d = d[order]
    if want_vectors:
        w[:, :] = w[:, order]
    _permute_columns(right_mats, order)
    return SubproblemSVD(d, w, qfull, edge)


# ---------------------------------------------------------------------------
# divide


def split(prob):
    """Remove the middle row k = n//2 (1-based) of an n-row problem.

    Returns (left, right, alpha, beta): a bordered left child of k-1 rows, a
    right child of n-k rows bordered iff the parent is, and the removed
    row's two entries alpha = d[k], beta = e[k].
    """
    n = prob.n
    if n < 2:
        raise ValueError(f"cannot split a problem with {n} rows")
    k = n // 2
    left = BidiagonalProblem(prob.d[: k - 1], prob.e[: k - 1], bordered=True)
    right = BidiagonalProblem(prob.d[k:], prob.e[k:], bordered=prob.bordered)
    return left, right, float(prob.d[k - 1]), float(prob.e[k - 1])


def build_z(node, left, right):
    """Middle matrix data for a merge: the removed row expressed in the
    children's right bases.

    Returns (d, z, coupling) in pre-sort order [border entry, left child
    values, right child values]: d = [0, D1, D2]; z = [z1, alpha * (last row
    of Q1), beta * (first row of Q2)].  For a bordered node the two
    column-space null directions (left child's trailing basis column scaled
    by alpha*lambda1, the node's own trailing column scaled by beta*phi2)
    are rotated together; ``coupling`` is that rotation (None for a square
    node) and z1 = hypot of the two couplings.
    """
    nl, nr = left.n, right.n
    k0 = nl
    alpha = float(node.d[k0])
    beta = float(node.e[k0])
    last_row_1 = left.edge_rows[1]
    first_row_2 = right.edge_rows[0]
    lam1 = last_row_1[nl]
    d = np.concatenate(([0.0], left.dvals, right.dvals))
    z = np.empty(d.size)
    z[1 : 1 + nl] = alpha * last_row_1[:nl]
    z[1 + nl :] = beta * first_row_2[:nr]
    if node.bordered:
        phi2 = first_row_2[nr]
        coupling, r0 = givens_generate(alpha * lam1, beta * phi2)
        z[0] = r0
    else:
        coupling = None
        z[0] = alpha * lam1
    return d, z, coupling


# ---------------------------------------------------------------------------
# deflation


def _merge_class(a, b):
    return a if a == b else _CLASS_MIXED


def deflate(
    d,
    z,
    left_vectors=None,
    right_vectors=None,
    *,
    edge_rows=None,
    left_classes=None,
    right_classes=None,
    tol_multiple=8.0,
):
    """Sort the merge entries and deflate the negligible ones.

    Works on copies of (d, z) but permutes/rotates the supplied column
    matrices (and class arrays) in place.  Entry 0 must carry d = 0: a tiny
    z[0] is clamped to +-tol, never deflated, so the secular system always
    exists.  Tiny z elsewhere deflate outright; surviving d-values closer
    than the tolerance are merged by a rotation that zeroes the later
    entry's z (pairs against entry 0 rotate only the right-side columns and
    deflate with value 0).
    """
    d = np.asarray(d, dtype=np.float64).copy()
    z = np.asarray(z, dtype=np.float64).copy()
    n = d.size
    perm = np.argsort(d, kind="stable")
    d = d[perm]
    z = z[perm]
    if d[0] != 0.0:
        raise ValueError("deflate expects one zero d entry (the border row)")
    side_mats = [left_vectors, right_vectors, edge_rows]
    _permute_columns(side_mats, perm)
    for cls in (left_classes, right_classes):
        if cls is not None:
            cls[:n] = cls[perm]
    tol = tol_multiple * EPS * max(
        np.max(np.abs(d)), np.max(np.abs(z)), 0.0
    )
    if abs(z[0]) <= tol:
        z[0] = np.copysign(max(tol, _TINY), z[0] if z[0] != 0.0 else 1.0)
    kept = [0]
    deflated = []
    deflated_values = []
    rotations = []
    for j in range(1, n):
        if abs(z[j]) <= tol:
            z[j] = 0.0
            deflated.append(j)
            deflated_values.append(d[j])
            continue
        p = kept[-1]
        if d[j] - d[p] <= tol:
            rot, r = givens_generate(z[p], z[j])
            z[p] = r
            z[j] = 0.0
            rotations.append((p, j, rot))
            if p == 0:
                # Pairing with the zero entry moves column mass into the
                # z column; only right-side columns rotate and the entry
                # deflates to an exact zero singular value.
                _mix_columns([right_vectors, edge_rows], p, j, rot.c, rot.s)
                if right_classes is not None:
                    right_classes[p] = right_classes[j] = _merge_class(
                        right_classes[p], right_classes[j]
                    )
                deflated.append(j)
                deflated_values.append(0.0)
            else:
                d[p] = d[j]
                _mix_columns(side_mats, p, j, rot.c, rot.s)
                for cls in (left_classes, right_classes):
                    if cls is not None:
                        cls[p] = cls[j] = _merge_class(cls[p], cls[j])
                deflated.append(j)
                deflated_values.append(d[j])
        else:
            kept.append(j)
    kept = np.asarray(kept, dtype=np.intp)
    deflated = np.asarray(deflated, dtype=np.intp)
    deflated_values = np.asarray(deflated_values)
    dk, zk = d[kept], z[kept]
    system = SecularSystem(
        dk, zk, float(np.sqrt(dk[-1] ** 2 + np.sum(zk**2)))
    )
    return DeflationOutcome(
        system, kept, deflated, deflated_values, rotations, perm, d, z
    )


# ---------------------------------------------------------------------------
# secular equation


def solve_all_roots(system, max_iterations=100):
    """All roots of the secular system, batched.

    Roots iterate in independent, frozen-on-convergence lanes, so any
    single-root run reproduces its batched lane bitwise.  Each root is found
    in the squared variable as an offset mu from its anchor pole: a
    two-pole rational model proposes steps, bisection takes over whenever a
    proposal leaves the bracket, and iteration stops when the residual
    reaches the sum-of-terms noise floor or the bracket collapses.
    """
    return _secular_roots(system.d, system.z, None, max_iterations)


def solve_secular(system, i, max_iterations=100):
    """Root i of the secular system as (omega, anchor, mu).

    Runs the same frozen-lane iteration as :func:`solve_all_roots`
    restricted to one lane; answers are bitwise identical to that lane of
    the batched solve.
    """
    roots = _secular_roots(
        system.d, system.z, np.asarray([i], dtype=np.intp), max_iterations
    )
    return float(roots.omega[0]), int(roots.anchor[0]), float(roots.mu[0])


def _secular_roots(d, z, indices, max_iterations):
    d = np.asarray(d, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    n = d.size
    idx = np.arange(n, dtype=np.intp) if indices is None else indices
    z2 = z * z
    z2sum = float(np.sum(z2))
    if n == 1:
        omega = np.sqrt(z2sum)
        return SecularRoots(
            np.full(idx.size, omega),
            np.zeros(idx.size, dtype=np.intp),
            np.full(idx.size, z2sum),
        )
    last = idx == n - 1
    ilow = idx
    ihigh = np.where(last, n - 1, np.minimum(idx + 1, n - 1))
    dlow = d[ilow]
    dhigh = d[ihigh]
    # Squared width of each root interval; the last root's virtual upper
    # pole sits ||z||^2 past the largest d.
    gap = np.where(last, z2sum, (dhigh - dlow) * (dhigh + dlow))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        den_mid = (
            (d[None, :] - dlow[:, None]) * (d[None, :] + dlow[:, None])
            - 0.5 * gap[:, None]
        )
        f_mid = 1.0 + np.sum(z2[None, :] / den_mid, axis=1)
    low_half = f_mid > 0.0
    anchor = np.where(low_half | last, ilow, ihigh)
    da = d[anchor]
    # Pole offsets from each root's anchor, in the squared variable, formed
    # without squaring: d_j^2 - d_a^2 = (d_j - d_a)(d_j + d_a).
    delta = (d[None, :] - da[:, None]) * (d[None, :] + da[:, None])
    delta_low = np.take_along_axis(delta, ilow[:, None], 1)[:, 0]
    delta_high = np.where(
        last,
        delta_low + z2sum,
        np.take_along_axis(delta, ihigh[:, None], 1)[:, 0],
    )
    # Bracket in mu relative to the anchor: the midpoint sign already says
    # which half of the pole interval holds the root.
    lo = np.where(low_half, 0.0, np.where(last, 0.5 * gap, -0.5 * gap))
    hi = np.where(low_half, 0.5 * gap, np.where(last, gap, 0.0))
    mu = 0.5 * (lo + hi)
    lower_mask = np.arange(n)[None, :] <= idx[:, None]
    active = np.ones(idx.size, dtype=bool)
    tol_f = 8.0 * n * EPS
    for _ in range(max_iterations):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            den = delta - mu[:, None]
            terms = z2[None, :] / den
            f = 1.0 + np.sum(terms, axis=1)
            sabs = 1.0 + np.sum(np.abs(terms), axis=1)
            width_done = (hi - lo) <= 8.0 * EPS * np.maximum(
                np.abs(lo), np.abs(hi)
            )
            done = (np.abs(f) <= tol_f * sabs) | width_done | ~np.isfinite(f)
            active &= ~done
            if not np.any(active):
                break
            below = active & (f < 0.0)
            above = active & ~(f < 0.0)
            lo = np.where(below, mu, lo)
            hi = np.where(above, mu, hi)
            # Two-pole rational model matched to psi/phi and derivatives.
            tsq = terms / den
            psi = np.sum(np.where(lower_mask, terms, 0.0), axis=1)
            phi = np.sum(np.where(lower_mask, 0.0, terms), axis=1)
            dpsi = np.sum(np.where(lower_mask, tsq, 0.0), axis=1)
            dphi = np.sum(np.where(lower_mask, 0.0, tsq), axis=1)
            ga = delta_low - mu
            gb = delta_high - mu
            big_s = dpsi * ga * ga
            cpsi = psi - dpsi * ga
            big_r = dphi * gb * gb
            cphi = phi - dphi * gb
            s0 = 1.0 + cpsi + cphi
            aq = s0
            bq = -(s0 * (ga + gb) + big_s + big_r)
            cq = s0 * ga * gb + big_s * gb + big_r * ga
            disc = np.maximum(bq * bq - 4.0 * aq * cq, 0.0)
            sq = np.sqrt(disc)
            qq = -0.5 * (bq + np.where(bq >= 0.0, sq, -sq))
            eta1 = qq / aq
            eta2 = cq / qq
            cand1 = mu + eta1
            cand2 = mu + eta2
            ok1 = np.isfinite(cand1) & (cand1 > lo) & (cand1 < hi)
            ok2 = np.isfinite(cand2) & (cand2 > lo) & (cand2 < hi)
            pick1 = ok1 & (~ok2 | (np.abs(eta1) <= np.abs(eta2)))
            proposal = np.where(
                pick1, cand1, np.where(ok2, cand2, 0.5 * (lo + hi))
            )
            mu = np.where(active, proposal, mu)
    if np.any(active):
        raise ConvergenceError(
            f"secular solver did not converge for {int(np.sum(active))} roots"
        )
    omega = np.sqrt(np.maximum(da * da + mu, 0.0))
    return SecularRoots(omega, anchor.astype(np.intp), mu)


def recompute_z(system, roots):
    """Update vector consistent with the computed roots.

    Magnitudes come from the product formula that makes (d, ztilde) have
    exactly the spectrum {omega_i}; every difference of squares is formed
    from the anchor/offset representation, never by subtracting squares.
    Interlacing makes each radicand positive, which is enforced.
    """
    d, z = system.d, system.z
    n = d.size
    da = d[roots.anchor]
    # num[i, k] = omega_k^2 - d_i^2, cancellation-free.
    num = (da[None, :] - d[:, None]) * (da[None, :] + d[:, None]) + roots.mu[
        None, :
    ]
    if n == 1:
        radicand = num[:, 0]
    else:
        dk = d[: n - 1]
        dk1 = d[1:]
        den_lower = (dk[None, :] - d[:, None]) * (dk[None, :] + d[:, None])
        den_upper = (dk1[None, :] - d[:, None]) * (dk1[None, :] + d[:, None])
        below = np.arange(n - 1)[None, :] < np.arange(n)[:, None]
        den = np.where(below, den_lower, den_upper)
        radicand = num[:, n - 1] * np.prod(num[:, : n - 1] / den, axis=1)
    if not np.all(radicand > 0.0):
        raise ArithmeticError(
            "root interlacing violated: non-positive radicand in z update"
        )
    return np.copysign(np.sqrt(radicand), z)


def secular_vectors(system, roots, ztilde):
    """Singular vectors of the middle matrix from the recomputed z.

    Column i of vmat is [ztilde_j / (d_j^2 - omega_i^2)] normalized; umat
    pairs it as [-1, d_2 v_2, ..., d_N v_N] normalized (the image of v under
    the middle matrix, up to scale).  With ztilde from
    :func:`recompute_z` the columns are numerically orthonormal.
    """
    d = system.d
    da = d[roots.anchor]
    den = (d[None, :] - da[:, None]) * (d[None, :] + da[:, None]) - roots.mu[
        :, None
    ]
    vraw = (ztilde[None, :] / den).T
    uraw = d[:, None] * vraw
    uraw[0, :] = -1.0
    vmat = vraw / np.linalg.norm(vraw, axis=0)
    umat = uraw / np.linalg.norm(uraw, axis=0)
    return np.asfortranarray(umat), np.asfortranarray(vmat)


# ---------------------------------------------------------------------------
# structured vector merge


def _structured_product(cols, classes, kept, small, top, bottom, unit_row=None):
    """out = cols[:, kept] @ small, exploiting the class block structure.

    Mixed-support columns contribute one full-height product; columns
    supported only in the top (rows < ``top``) or bottom (rows >=
    ``bottom``) block contribute one product each over their block;  a
    unit-row column (left side only) adds its combiner row into
    ``unit_row``.  Three gemms total, plus the row update.
    """
    rows = cols.shape[0]
    nout = small.shape[1]
    out = np.zeros((rows, nout), order="F")
    cls = classes[kept]
    g_mixed = np.flatnonzero(cls == _CLASS_MIXED)
    g_first = np.flatnonzero(cls == _CLASS_FIRST)
    g_second = np.flatnonzero(cls == _CLASS_SECOND)
    g_unit = np.flatnonzero(cls == _CLASS_UNIT)
    if g_mixed.size:
        out += cols[:, kept[g_mixed]] @ small[g_mixed, :]
    if g_first.size:
        out[:top, :] += cols[:top, kept[g_first]] @ small[g_first, :]
    if g_second.size:
        out[bottom:, :] += cols[bottom:, kept[g_second]] @ small[g_second, :]
    if g_unit.size:
        if unit_row is None:
            raise ValueError("unit-class column without a unit row")
        out[unit_row, :] += small[g_unit[0], :]
    return out


def merge_vectors(outcome, umat, vmat, left, right, left_classes, right_classes, mid_row):
    """Assemble a merged node's vector columns: kept columns through the
    structured products, deflated columns carried over unchanged.

    Returns (w_cols, q_cols) ordered [kept | deflated] to match
    ``outcome``; the caller interleaves them by singular value.
    """
    kept, deflated = outcome.kept, outcome.deflated
    w_kept = _structured_product(
        left, left_classes, kept, umat, mid_row, mid_row + 1, unit_row=mid_row
    )
    q_kept = _structured_product(
        right, right_classes, kept, vmat, mid_row + 1, mid_row + 1
    )
    w_cols = np.hstack([w_kept, left[:, deflated]])
    q_cols = np.hstack([q_kept, right[:, deflated]])
    return np.asfortranarray(w_cols), np.asfortranarray(q_cols)


# ---------------------------------------------------------------------------
# recursion


def _empty_svd(prob, want_vectors):
    ncols = prob.ncols
    edge = np.zeros((2, ncols))
    if ncols:
        edge[0, 0] = 1.0
        edge[1, ncols - 1] = 1.0
    return SubproblemSVD(
        np.zeros(0),
        np.zeros((0, 0)) if want_vectors else None,
        np.eye(ncols, order="F") if want_vectors else None,
        edge,
    )


def _merge(node, left, right, want_vectors, tol_multiple):
    nl, nr = left.n, right.n
    n = node.n
    k0 = nl
    ncols = node.ncols
    gamma = 1 if node.bordered else 0
    d_pre, z_pre, coupling = build_z(node, left, right)
    # Edge-row companion of the node's right basis, in pre-sort column
    # order; this is the only source of the values chain (both modes).
    fr1 = left.edge_rows[0]
    lr2 = right.edge_rows[1]
    edge = np.zeros((2, n))
    edge[0, 1 : 1 + nl] = fr1[:nl]
    edge[1, 1 + nl :] = lr2[:nr]
    if gamma:
        edge[0, 0] = coupling.c * fr1[nl]
        edge[1, 0] = coupling.s * lr2[nr]
        null_edge = np.array([-coupling.s * fr1[nl], coupling.c * lr2[nr]])
    else:
        edge[0, 0] = fr1[nl]
        edge[1, 0] = 0.0
        null_edge = None
    right_classes = np.full(n, _CLASS_MIXED if gamma else _CLASS_FIRST)
    right_classes[1 : 1 + nl] = _CLASS_FIRST
    right_classes[1 + nl :] = _CLASS_SECOND
    left_classes = np.full(n, _CLASS_UNIT)
    left_classes[1 : 1 + nl] = _CLASS_FIRST
    left_classes[1 + nl :] = _CLASS_SECOND
    if want_vectors:
        l_pre = np.zeros((n, n), order="F")
        l_pre[k0, 0] = 1.0
        l_pre[:nl, 1 : 1 + nl] = left.w
        l_pre[nl + 1 :, 1 + nl :] = right.w
        r_pre = np.zeros((ncols, n), order="F")
        q1hat = np.zeros(ncols)
        q1hat[: nl + 1] = left.qfull[:, nl]
        if gamma:
            q2hat = np.zeros(ncols)
            q2hat[nl + 1 :] = right.qfull[:, nr]
            r_pre[:, 0] = coupling.c * q1hat + coupling.s * q2hat
            null_col = -coupling.s * q1hat + coupling.c * q2hat
        else:
            r_pre[:, 0] = q1hat
            null_col = None
        r_pre[: nl + 1, 1 : 1 + nl] = left.qfull[:, :nl]
        r_pre[nl + 1 :, 1 + nl :] = right.qfull[:, :nr]
    else:
        l_pre = r_pre = null_col = None
    outcome = deflate(
        d_pre,
        z_pre,
        l_pre,
        r_pre,
        edge_rows=edge,
        left_classes=left_classes,
        right_classes=right_classes,
        tol_multiple=tol_multiple,
    )
    roots = solve_all_roots(outcome.system)
    ztilde = recompute_z(outcome.system, roots)
    umat, vmat = secular_vectors(outcome.system, roots, ztilde)
    values = np.concatenate([roots.omega, outcome.deflated_values])
    edge_cols = np.hstack([edge[:, outcome.kept] @ vmat, edge[:, outcome.deflated]])
    order = np.argsort(values, kind="stable")
    values = values[order]
    edge_new = np.empty((2, ncols))
    edge_new[:, :n] = edge_cols[:, order]
    if gamma:
        edge_new[:, n] = null_edge
    if not want_vectors:
        return SubproblemSVD(values, None, None, edge_new)
    w_cols, q_cols = merge_vectors(
        outcome, umat, vmat, l_pre, r_pre, left_classes, right_classes, k0
    )
    w_new = np.asfortranarray(w_cols[:, order])
    q_new = np.zeros((ncols, ncols), order="F")
    q_new[:, :n] = q_cols[:, order]
    if gamma:
        q_new[:, n] = null_col
    return SubproblemSVD(values, w_new, q_new, edge_new)


def _recurse(prob, want_vectors, leaf, tol_multiple):
    if prob.n == 0:
        return _empty_svd(prob, want_vectors)
    if prob.n <= leaf:
        return bdsqr_base(prob, want_vectors)
    lp, rp, _, _ = split(prob)
    left = _recurse(lp, want_vectors, leaf, tol_multiple)
    right = _recurse(rp, want_vectors, leaf, tol_multiple)
    return _merge(prob, left, right, want_vectors, tol_multiple)


def bdsdc(prob, want_vectors=True, leaf=32, tol_multiple=8.0):
    """SVD of a bidiagonal problem by divide and conquer.

    Returns a :class:`SubproblemSVD` with singular values descending and
    non-negative.  ``leaf`` bounds the QR-iteration base case; values-only
    runs (``want_vectors=False``) produce bitwise the same values.
    """
    if leaf < 1:
        raise ValueError(f"leaf size must be >= 1, got {leaf}")
    res = _recurse(prob, want_vectors, leaf, tol_multiple)
    n = res.n
    rev = np.arange(n - 1, -1, -1)
    edge = res.edge_rows.copy()
    edge[:, :n] = edge[:, rev]
    w = qfull = None
    if want_vectors:
        w = np.asfortranarray(res.w[:, rev])
        qfull = res.qfull.copy(order="F")
        qfull[:, :n] = qfull[:, rev]
    return SubproblemSVD(res.dvals[rev].copy(), w, qfull, edge)
