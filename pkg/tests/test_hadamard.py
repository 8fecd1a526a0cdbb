import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutlab.hadamard import (
    EncodingMatrix, check_rows_explicit, check_rows_factored, encoding_row, hadamard, pair_to_row, row_count,
    row_index_pair,
)


def test_sylvester_row():
    assert list(hadamard(2).row(3)) == [1, 1, -1, -1]
    with pytest.raises(IndexError):
        hadamard(2).row(5)
    with pytest.raises(ValueError):
        hadamard(13)


def test_row_pairs():
    assert row_index_pair(2, 4) == (3, 2)
    assert row_index_pair(2, 1) == (2, 2)
    assert row_index_pair(2, 9) == (4, 4)
    with pytest.raises(IndexError):
        row_index_pair(2, 10)


def test_single_row_when_k_is_one():
    em = EncodingMatrix(1)
    assert em.rows == 1
    assert list(em.row(1)) == [1, -1, -1, 1]


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_orthogonal_explicit(k):
    assert check_rows_explicit(k)


@pytest.mark.parametrize("k", [5, 6])
def test_orthogonal_factored(k):
    assert check_rows_factored(k)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.data())
def test_pair_roundtrip_and_factors(k, data):
    t = data.draw(st.integers(1, row_count(k)))
    i, j = row_index_pair(k, t)
    assert pair_to_row(k, i, j) == t
    row, h_a, h_b = encoding_row(k, t)
    side = 1 << k
    # column (a, b) is left-node-major
    assert np.array_equal(row.reshape(side, side), np.outer(h_a, h_b))
    assert row.sum() == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_combine_matches_explicit_sum(k, seed):
    em = EncodingMatrix(k)
    z = np.random.default_rng(seed).choice([-1, 1], size=em.rows)
    explicit = sum(z[t - 1] * em.row(t) for t in range(1, em.rows + 1))
    assert np.array_equal(em.combine(z), explicit)
    # inner product with each row recovers the coefficient
    x = em.combine(z)
    for t in range(1, em.rows + 1):
        assert x @ em.row(t) == z[t - 1] * em.dimension
