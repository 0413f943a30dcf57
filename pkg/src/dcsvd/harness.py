"""Test harness: reproducible matrix generators, accuracy metrics, the DSVD
matrix file format, and the command-line interface.

Randomness comes from the Philox-4x64-10 counter-based generator keyed by
the user's seed, consumed as a single word stream.  The word-to-double and
normal-variate conversions are fixed here (not delegated to numpy's
distributions) so the streams are reproducible from the documented
definition: word w -> uniform ((w >> 11) + 0.5) * 2^-53 in (0, 1); uniform
pairs (u1, u2) -> normals via Box-Muller, r = sqrt(-2 ln u1), z = (r cos(2
pi u2), r sin(2 pi u2)).  Matrices fill column-major.
"""

import argparse
import struct
import sys
from dataclasses import dataclass

import numpy as np

from .driver import PHASE_NAMES, SVDOptions, gesdd, phase_profile
from .qrblock import geqrf_blocked, orgqr

__all__ = [
    "AccuracyReport",
    "MatrixSpec",
    "accuracy",
    "cli_main",
    "generate_matrix",
    "main",
    "prescribed_singular_values",
    "read_matrix",
    "write_matrix",
]

EPS = np.finfo(np.float64).eps
KINDS = ("random", "logrand", "arith", "geo")

_MAGIC = b"DSVD"
_VERSION = 1


@dataclass
class MatrixSpec:
    """Recipe for one reproducible test matrix.

    ``kind`` 'random' draws entries uniform in (0, 1) (``cond`` unused); the
    other kinds build A = U diag(sigma) V^T with random orthogonal factors
    and singular values spread over [1/cond, 1]: 'logrand' log-uniform,
    'arith' arithmetic, 'geo' geometric.
    """

    kind: str
    m: int
    n: int
    cond: float = 1.0e6
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"matrix must be nonempty, got {self.m}x{self.n}")
        if not self.cond >= 1.0:
            raise ValueError(f"cond must be >= 1, got {self.cond}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")


class _Stream:
    """Sequential word stream from Philox-4x64-10 with the documented
    conversions."""

    def __init__(self, seed):
        self._bits = np.random.Philox(key=seed)

    def uniforms(self, count):
        words = self._bits.random_raw(count)
        return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normals(self, count):
        pairs = (count + 1) // 2
        u = self.uniforms(2 * pairs)
        r = np.sqrt(-2.0 * np.log(u[0::2]))
        angle = 2.0 * np.pi * u[1::2]
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(angle)
        z[1::2] = r * np.sin(angle)
        return z[:count]


def _sigma_from_stream(kind, n, cond, stream):
    i = np.arange(n, dtype=np.float64)
    if kind == "logrand":
        # log sigma uniform on (-log cond, 0), sorted descending.
        u = stream.uniforms(n)
        return np.sort(np.exp(-np.log(cond) * u))[::-1].copy()
    if kind == "arith":
        if n == 1:
            return np.ones(1)
        return 1.0 - (i / (n - 1)) * (1.0 - 1.0 / cond)
    if kind == "geo":
        if n == 1:
            return np.ones(1)
        return cond ** (-i / (n - 1))
    raise ValueError(f"kind {kind!r} has no prescribed singular values")


def prescribed_singular_values(kind, n, cond, seed=0):
    """Ground-truth singular values a generated matrix is built from.

    For 'logrand' this replays the draw that :func:`generate_matrix` makes
    first on the same seed; 'arith'/'geo' are deterministic.
    """
    return _sigma_from_stream(kind, n, cond, _Stream(seed))


def _random_orthogonal(stream, rows, cols):
    """QR orthogonal factor of a standard-normal matrix, with the sign of
    each R diagonal entry absorbed so the distribution is unbiased."""
    g = np.asfortranarray(
        stream.normals(rows * cols).reshape((rows, cols), order="F")
    )
    fact = geqrf_blocked(g, block=32)
    q = orgqr(fact, cols)
    for j in range(cols):
        if fact.packed[j, j] < 0.0:
            q[:, j] = -q[:, j]
    return q


def generate_matrix(spec):
    """Build the matrix described by ``spec`` (column-major float64).

    Stream consumption order: 'random' fills m*n uniforms column-major; the
    prescribed-spectrum kinds draw sigma first (logrand only), then the
    left, then the right orthogonal factor.
    """
    stream = _Stream(spec.seed)
    if spec.kind == "random":
        return np.asfortranarray(
            stream.uniforms(spec.m * spec.n).reshape((spec.m, spec.n), order="F")
        )
    k = min(spec.m, spec.n)
    sigma = _sigma_from_stream(spec.kind, k, spec.cond, stream)
    u = _random_orthogonal(stream, spec.m, k)
    v = _random_orthogonal(stream, spec.n, k)
    return np.asfortranarray((u * sigma) @ v.T)


@dataclass
class AccuracyReport:
    """Scaled error metrics for one computed SVD.

    e_sigma = ||sigma - reference||_F / k (None without a reference);
    e_svd = ||A - U diag(sigma) Vt||_F / ||A||_F (None without vectors);
    orth_u/orth_v are the Frobenius Gram residuals of the computed factors.
    """

    e_sigma: float | None
    e_svd: float | None
    orth_u: float | None
    orth_v: float | None


def accuracy(a, result, reference_sigma=None):
    """Measure a computed SVD against its input (and optional ground truth)."""
    e_sigma = None
    if reference_sigma is not None:
        ref = np.asarray(reference_sigma, dtype=np.float64)
        if ref.shape != result.sigma.shape:
            raise ValueError(
                f"reference has {ref.size} values, result has {result.sigma.size}"
            )
        e_sigma = float(np.linalg.norm(result.sigma - ref) / ref.size)
    e_svd = orth_u = orth_v = None
    if result.u is not None and result.vt is not None:
        k = result.sigma.size
        resid = np.linalg.norm(a - (result.u * result.sigma) @ result.vt)
        norm_a = np.linalg.norm(a)
        e_svd = float(resid / norm_a) if norm_a > 0.0 else float(resid)
        orth_u = float(
            np.linalg.norm(result.u.T @ result.u - np.eye(k))
        )
        orth_v = float(
            np.linalg.norm(result.vt @ result.vt.T - np.eye(k))
        )
    return AccuracyReport(e_sigma, e_svd, orth_u, orth_v)


# ---------------------------------------------------------------------------
# DSVD file format: magic 'DSVD', version u16, m u64, n u64 (all
# little-endian), then m*n float64 entries column-major.  Text mode is
# whitespace-separated rows with round-trip-exact %.17g formatting.


def write_matrix(path, a, text=False):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    if text:
        np.savetxt(path, a, fmt="%.17g")
        return
    m, n = a.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HQQ", _VERSION, m, n))
        fh.write(np.asfortranarray(a).astype("<f8").tobytes(order="F"))


def read_matrix(path):
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head != _MAGIC:
            return np.asfortranarray(np.loadtxt(path, ndmin=2))
        meta = fh.read(18)
        if len(meta) != 18:
            raise ValueError(f"{path}: truncated header")
        version, m, n = struct.unpack("<HQQ", meta)
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        payload = fh.read()
    expected = m * n * 8
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    return np.asfortranarray(
        np.frombuffer(payload, dtype="<f8").reshape((m, n), order="F")
    )


# ---------------------------------------------------------------------------
# command-line interface


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dcsvd",
        description="Dense SVD: generate test matrices, decompose, verify, profile.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a test matrix file")
    gen.add_argument("--kind", required=True, choices=KINDS)
    gen.add_argument("--m", required=True, type=int)
    gen.add_argument("--n", required=True, type=int)
    gen.add_argument("--cond", type=float, default=1.0e6)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--text", action="store_true")

    run = sub.add_parser("run", help="decompose a matrix file")
    run.add_argument("--input", required=True)
    run.add_argument("--jobz", choices=("n", "s"), default="s")
    run.add_argument("--block-bidiag", type=int, default=32)
    run.add_argument("--block-qr", type=int, default=32)
    run.add_argument("--block-orgqr", type=int, default=64)
    run.add_argument("--block-apply", type=int, default=64)
    run.add_argument("--leaf", type=int, default=32)
    run.add_argument("--crossover", type=float, default=5.0 / 3.0)
    run.add_argument("--out-u")
    run.add_argument("--out-s")
    run.add_argument("--out-vt")

    verify = sub.add_parser("verify", help="decompose and check accuracy")
    verify.add_argument("--input", required=True)
    verify.add_argument("--tol", type=float, default=None)

    profile = sub.add_parser("profile", help="decompose with phase timings")
    profile.add_argument("--input", required=True)
    profile.add_argument("--csv", required=True)
    profile.add_argument("--jobz", choices=("n", "s"), default="s")
    return parser


def _options_from_args(args, want_vectors):
    return SVDOptions(
        want_vectors=want_vectors,
        bidiag_block=args.block_bidiag,
        qr_block=args.block_qr,
        orgqr_block=args.block_orgqr,
        apply_block=args.block_apply,
        leaf_size=args.leaf,
        ts_crossover=args.crossover,
    )


def _cmd_gen(args):
    spec = MatrixSpec(
        kind=args.kind, m=args.m, n=args.n, cond=args.cond, seed=args.seed
    )
    write_matrix(args.out, generate_matrix(spec), text=args.text)
    return 0


def _cmd_run(args):
    a = read_matrix(args.input)
    want = args.jobz == "s"
    if not want and (args.out_u or args.out_vt):
        print("run: --jobz n computes no vectors to write", file=sys.stderr)
        return 2
    result = gesdd(a, _options_from_args(args, want))
    for value in result.sigma:
        print(f"{value:.17g}")
    if args.out_s:
        write_matrix(args.out_s, result.sigma.reshape(-1, 1))
    if args.out_u:
        write_matrix(args.out_u, result.u)
    if args.out_vt:
        write_matrix(args.out_vt, result.vt)
    return 0


def _cmd_verify(args):
    a = read_matrix(args.input)
    result = gesdd(a, SVDOptions(want_vectors=True))
    report = accuracy(a, result)
    tol = args.tol if args.tol is not None else 100.0 * min(a.shape) * EPS
    checks = (
        ("reconstruction", report.e_svd),
        ("left orthogonality", report.orth_u),
        ("right orthogonality", report.orth_v),
    )
    failed = False
    for name, value in checks:
        ok = value <= tol
        failed |= not ok
        print(f"{name}: {value:.3e} {'<=' if ok else '>'} {tol:.3e} "
              f"[{'ok' if ok else 'FAIL'}]")
    return 1 if failed else 0


def _cmd_profile(args):
    a = read_matrix(args.input)
    prof = phase_profile(a, SVDOptions(want_vectors=args.jobz == "s"))
    with open(args.csv, "w") as fh:
        fh.write("phase,seconds\n")
        for name, seconds in prof.phases:
            fh.write(f"{name},{seconds:.9f}\n")
    assert len(prof.phases) == len(PHASE_NAMES)
    return 0


def cli_main(argv=None):
    """Entry point; returns the process exit code (2 on bad usage)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    handlers = {
        "gen": _cmd_gen,
        "run": _cmd_run,
        "verify": _cmd_verify,
        "profile": _cmd_profile,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ValueError) as exc:
        print(f"dcsvd {args.command}: {exc}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
