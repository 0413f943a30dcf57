"""Back-transformation tests: applying the stored column/row reflector
sequences of a bidiagonalization to dense blocks of vectors."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dcsvd.backtransform import (
    ReflectorSequence,
    column_reflectors,
    ormlq_like,
    ormqr_like,
    row_reflectors,
)
from dcsvd.bidiag import gebrd_blocked
from oracles import reflector_matrix


def _dense_factors(fact):
    m, n = fact.packed.shape
    u1 = np.eye(m)
    for j in range(n):
        u1 = u1 @ reflector_matrix(m, j, fact.tauq[j], fact.packed[j + 1 :, j])
    v1 = np.eye(n)
    for j in range(n - 1):
        v1 = v1 @ reflector_matrix(n, j + 1, fact.taup[j], fact.packed[j, j + 2 :])
    return u1, v1


@pytest.fixture(scope="module")
def factorization():
    rng = np.random.default_rng(61)
    a = np.asfortranarray(rng.standard_normal((13, 10)))
    fact = gebrd_blocked(a, block=3)
    u1, v1 = _dense_factors(fact)
    return fact, u1, v1


class TestSequences:
    def test_column_sequence_geometry(self, factorization):
        fact, _, _ = factorization
        seq = column_reflectors(fact)
        assert seq.side == "left"
        assert seq.offset == 0
        assert seq.count == 10

    def test_row_sequence_geometry(self, factorization):
        fact, _, _ = factorization
        seq = row_reflectors(fact)
        assert seq.side == "right"
        assert seq.offset == 1
        assert seq.count == 9


class TestOrmqrLike:
    @pytest.mark.parametrize("transpose", [False, True])
    @pytest.mark.parametrize("block", [2, 3, 64])
    def test_matches_dense_product(self, factorization, transpose, block):
        fact, u1, _ = factorization
        rng = np.random.default_rng(62)
        c0 = np.asfortranarray(rng.standard_normal((13, 6)))
        expect = (u1.T if transpose else u1) @ c0
        got = ormqr_like(
            column_reflectors(fact), c0.copy(order="F"), transpose, block
        )
        assert_allclose(got, expect, atol=1e-13 * np.linalg.norm(c0))

    def test_round_trip_is_identity(self, factorization):
        fact, _, _ = factorization
        rng = np.random.default_rng(63)
        c0 = np.asfortranarray(rng.standard_normal((13, 4)))
        c = c0.copy(order="F")
        ormqr_like(column_reflectors(fact), c)
        ormqr_like(column_reflectors(fact), c, transpose=True)
        assert_allclose(c, c0, atol=1e-13 * np.linalg.norm(c0))

    def test_wrong_side_rejected(self, factorization):
        fact, _, _ = factorization
        with pytest.raises(ValueError):
            ormqr_like(row_reflectors(fact), np.zeros((13, 2), order="F"))

    def test_row_count_validated(self, factorization):
        fact, _, _ = factorization
        with pytest.raises(ValueError):
            ormqr_like(column_reflectors(fact), np.zeros((12, 2), order="F"))


class TestOrmlqLike:
    @pytest.mark.parametrize("transpose", [False, True])
    @pytest.mark.parametrize("block", [2, 3, 64])
    def test_matches_dense_product(self, factorization, transpose, block):
        fact, _, v1 = factorization
        rng = np.random.default_rng(64)
        c0 = np.asfortranarray(rng.standard_normal((6, 10)))
        expect = c0 @ (v1.T if transpose else v1)
        got = ormlq_like(
            row_reflectors(fact), c0.copy(order="F"), transpose, block
        )
        assert_allclose(got, expect, atol=1e-13 * np.linalg.norm(c0))

    def test_round_trip_is_identity(self, factorization):
        fact, _, _ = factorization
        rng = np.random.default_rng(65)
        c0 = np.asfortranarray(rng.standard_normal((4, 10)))
        c = c0.copy(order="F")
        ormlq_like(row_reflectors(fact), c)
        ormlq_like(row_reflectors(fact), c, transpose=True)
        assert_allclose(c, c0, atol=1e-13 * np.linalg.norm(c0))

    def test_wrong_side_rejected(self, factorization):
        fact, _, _ = factorization
        with pytest.raises(ValueError):
            ormlq_like(column_reflectors(fact), np.zeros((2, 13), order="F"))

    def test_column_count_validated(self, factorization):
        fact, _, _ = factorization
        with pytest.raises(ValueError):
            ormlq_like(row_reflectors(fact), np.zeros((2, 9), order="F"))


class TestSquareInput:
    def test_both_sequences_on_square_factorization(self):
        # A square matrix makes the final column reflector trivial (tau = 0),
        # which both sequences must treat as the identity.
        rng = np.random.default_rng(66)
        a = np.asfortranarray(rng.standard_normal((8, 8)))
        fact = gebrd_blocked(a, block=3)
        u1, v1 = _dense_factors(fact)
        assert fact.tauq[-1] == 0.0
        c = np.asfortranarray(np.eye(8))
        got_u = ormqr_like(column_reflectors(fact), c.copy(order="F"))
        assert_allclose(got_u, u1, atol=1e-13)
        got_v = ormlq_like(row_reflectors(fact), c.copy(order="F"))
        assert_allclose(got_v, v1, atol=1e-13)

    def test_single_column_row_sequence_is_empty(self):
        rng = np.random.default_rng(67)
        a = np.asfortranarray(rng.standard_normal((5, 1)))
        fact = gebrd_blocked(a)
        seq = row_reflectors(fact)
        assert seq.count == 0
        c = np.asfortranarray(rng.standard_normal((3, 1)))
        c0 = c.copy()
        ormlq_like(seq, c)
        assert_allclose(c, c0, atol=0)

    def test_sequence_container_fields(self):
        seq = ReflectorSequence(np.zeros((2, 2)), np.zeros(2), "left", 0, 2)
        assert seq.side == "left" and seq.count == 2
