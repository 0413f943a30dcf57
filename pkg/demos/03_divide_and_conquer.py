"""Inside the bidiagonal divide-and-conquer solver.

bdsdc splits a bidiagonal matrix in half, solves each half recursively, and
glues the halves back together.  The glue step is where everything happens:
the two solved halves couple through a single row, producing a "middle
matrix" M whose first row is a vector z and whose diagonal carries the
children's singular values d.  M's singular values are the roots of the
rational secular equation

    f(w) = 1 + sum_j z_j^2 / (d_j^2 - w^2) = 0,

one root strictly between each adjacent pair of poles.  Before solving,
deflation removes entries that already are singular values (tiny z_j, or
near-duplicate d_j collapsed by one Givens rotation).

The demo walks one merge by hand on a tiny instance, then runs the full
recursion against the rotation-based QR-iteration solver on a larger one.
"""

import numpy as np

from dcsvd import (
    BidiagonalProblem,
    SecularSystem,
    bdsdc,
    bdsqr_base,
    deflate,
    recompute_z,
    solve_all_roots,
    solve_secular,
)


def middle_dense(d, z):
    m = np.diag(d).astype(float)
    m[0, :] = z
    return m


def main():
    print("=== the golden merge ===")
    # d = [0, 1], z = [1, 1]: the squared singular values of the middle
    # matrix are (3 -/+ sqrt(5))/2 — golden-ratio territory.
    system = SecularSystem(np.array([0.0, 1.0]), np.array([1.0, 1.0]), np.sqrt(3.0))
    for i in range(2):
        omega, anchor, mu = solve_secular(system, i)
        exact_sq = (3.0 + (2 * i - 1) * np.sqrt(5.0)) / 2.0
        print(
            f"  root {i}: omega = {omega:.15f}  (anchored at pole {anchor}, "
            f"offset mu = {mu:+.3e}); omega^2 - exact = {omega**2 - exact_sq:+.1e}"
        )

    print("\n=== deflation on an engineered instance ===")
    d = np.array([0.0, 0.7, 0.7, 1.4, 2.0])
    z = np.array([0.9, 0.5, 0.5, 1e-18, 0.3])
    print(f"  d = {d}")
    print(f"  z = {z}")
    outcome = deflate(d, z)
    print(f"  kept poles        : {outcome.kept}  (survive to the secular solve)")
    print(f"  deflated entries  : {outcome.deflated} with values {outcome.deflated_values}")
    print(f"  rotations applied : {len(outcome.applied_rotations)} (duplicate-pole collapse)")
    roots = solve_all_roots(outcome.system)
    merged = np.sort(np.concatenate([roots.omega, outcome.deflated_values]))[::-1]
    ref = np.linalg.svd(middle_dense(d, z), compute_uv=False)
    print(f"  singular values   : {np.array2string(merged, precision=12)}")
    print(f"  vs dense SVD of M : max diff = {np.max(np.abs(merged - ref)):.2e}")

    ztilde = recompute_z(outcome.system, roots)
    print("  recomputed z hat  : rebuilt from the roots so every secular")
    print(f"                      vector is orthogonal to rounding; "
          f"max |z - zhat| = {np.max(np.abs(outcome.system.z - ztilde)):.2e}")

    print("\n=== full recursion vs QR iteration ===")
    rng = np.random.default_rng(3)
    n = 200
    prob = BidiagonalProblem(rng.standard_normal(n), rng.standard_normal(n - 1))
    res = bdsdc(prob)
    ref_vals = bdsqr_base(prob, want_vectors=False).dvals[::-1]
    print(f"  n = {n}, leaf size 32 -> {n.bit_length() - 5} levels of merging")
    print(f"  max |sigma_dc - sigma_qr| / sigma_1 = "
          f"{np.max(np.abs(res.dvals - ref_vals)) / ref_vals[0]:.2e}")
    b = np.diag(prob.d) + np.diag(prob.e[: n - 1], 1)
    recon = res.w @ np.diag(res.dvals) @ res.qfull.T
    print(f"  ||B - W Sigma Q^T||_F / ||B||_F = "
          f"{np.linalg.norm(b - recon) / np.linalg.norm(b):.2e}")
    print(f"  ||W^T W - I||_F = {np.linalg.norm(res.w.T @ res.w - np.eye(n)):.2e}")


if __name__ == "__main__":
    main()
