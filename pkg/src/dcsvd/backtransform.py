"""Applying the reflector sequences stored by bidiagonalization to the
divide-and-conquer singular vectors.

Column reflectors (pivot on the diagonal) multiply from the left; row
reflectors (pivot one past the diagonal) multiply from the right.  Both are
applied in compact-WY blocks rebuilt on the fly from packed storage, so the
whole back-transformation is matrix-matrix work.
"""

from dataclasses import dataclass

import numpy as np

from .qrblock import (
    CompactWYBlock,
    apply_block_reflector_left,
    apply_block_reflector_right,
    build_tinv,
)

__all__ = [
    "ReflectorSequence",
    "column_reflectors",
    "ormlq_like",
    "ormqr_like",
    "row_reflectors",
]


@dataclass
class ReflectorSequence:
    """Packed Householder product with its application geometry.

    ``side`` 'left' means column reflectors stored below the diagonal of
    ``packed`` (pivot row = reflector index); 'right' means row reflectors
    stored right of the superdiagonal (pivot column = index + offset).
    ``count`` reflectors participate.
    """

    packed: np.ndarray
    tau: np.ndarray
    side: str
    offset: int
    count: int


def column_reflectors(fact):
    """Left-side sequence U1 = H_1...H_n from a bidiagonalization."""
    return ReflectorSequence(
        fact.packed, fact.tauq, "left", 0, fact.packed.shape[1]
    )


def row_reflectors(fact):
    """Right-side sequence V1 = G_1...G_{n-1} from a bidiagonalization."""
    n = fact.packed.shape[1]
    return ReflectorSequence(fact.packed, fact.taup, "right", 1, max(n - 1, 0))


def _column_block(seq, off, width):
    """Block of column reflectors off..off+width-1, restricted to the rows
    they act on (global rows >= off)."""
    m = seq.packed.shape[0]
    y = np.zeros((m - off, width), order="F")
    tau = seq.tau[off : off + width]
    for j in range(width):
        i = off + j
        if tau[j] == 0.0:
            continue
        y[j, j] = 1.0
        y[j + 1 :, j] = seq.packed[i + 1 :, i]
    return CompactWYBlock(y, build_tinv(y, tau)), off


def _row_block(seq, off, width):
    """Block of row reflectors off..off+width-1, restricted to the
    coordinates they act on (global columns >= off+1)."""
    n = seq.packed.shape[1]
    y = np.zeros((n - off - 1, width), order="F")
    tau = seq.tau[off : off + width]
    for j in range(width):
        i = off + j
        if tau[j] == 0.0:
            continue
        y[j, j] = 1.0
        y[j + 1 :, j] = seq.packed[i, i + 2 :]
    return CompactWYBlock(y, build_tinv(y, tau)), off + 1


def ormqr_like(seq, c, transpose=False, block=64):
    """C <- U1 C (or U1^T C): apply a left-side reflector sequence.

    The product is applied block by block — back to front for U1, front to
    back with transposed blocks for U1^T.
    """
    if seq.side != "left":
        raise ValueError(f"expected a left-side sequence, got {seq.side!r}")
    if c.shape[0] != seq.packed.shape[0]:
        raise ValueError(
            f"C has {c.shape[0]} rows, sequence acts on {seq.packed.shape[0]}"
        )
    starts = list(range(0, seq.count, block))
    if not transpose:
        starts = reversed(starts)
    for off in starts:
        width = min(block, seq.count - off)
        blk, row0 = _column_block(seq, off, width)
        apply_block_reflector_left(blk, c[row0:, :], transpose=transpose)
    return c


def ormlq_like(seq, c, transpose=False, block=64):
    """C <- C V1 (or C V1^T): apply a right-side reflector sequence.

    Blocks run front to back for V1, back to front with transposed blocks
    for V1^T.
    """
    if seq.side != "right":
        raise ValueError(f"expected a right-side sequence, got {seq.side!r}")
    if c.shape[1] != seq.packed.shape[1]:
        raise ValueError(
            f"C has {c.shape[1]} columns, sequence acts on {seq.packed.shape[1]}"
        )
    starts = list(range(0, seq.count, block))
    if transpose:
        starts = reversed(starts)
    for off in starts:
        width = min(block, seq.count - off)
        blk, col0 = _row_block(seq, off, width)
        apply_block_reflector_right(blk, c[:, col0:], transpose=transpose)
    return c
