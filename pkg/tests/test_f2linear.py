import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcgb.f2linear import BitMatrix, EchelonBasis, kernel_basis, rank, replay, row_reduce


@st.composite
def matrices(draw, max_rows=8, max_cols=10):
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(0, max_cols))
    bits = draw(st.lists(st.integers(0, (1 << cols) - 1), min_size=rows, max_size=rows))
    return BitMatrix(rows, cols, bits)


def transpose(m: BitMatrix) -> BitMatrix:
    bits = [sum(((m.bits[r] >> c) & 1) << r for r in range(m.rows)) for c in range(m.cols)]
    return BitMatrix(m.cols, m.rows, bits)


def test_identity_is_its_own_rref():
    red, pivots, ops = row_reduce(BitMatrix.identity(3))
    assert red == BitMatrix.identity(3)
    assert pivots == [0, 1, 2]
    assert ops == []


def test_zero_matrix():
    red, pivots, _ = row_reduce(BitMatrix.zero(2, 4))
    assert red == BitMatrix.zero(2, 4)
    assert pivots == []


def test_dependent_third_row():
    m = BitMatrix.from_strings(["1100", "0110", "1010"])
    red, pivots, _ = row_reduce(m)
    assert rank(m) == 2
    assert red.to_strings() == ["1010", "0110", "0000"]
    assert pivots == [0, 1]


def test_empty_matrix():
    red, pivots, ops = row_reduce(BitMatrix(0, 0))
    assert (red.rows, red.cols, pivots, ops) == (0, 0, [], [])


def test_storage_rejects_stray_bits():
    with pytest.raises(ValueError):
        BitMatrix(1, 2, [0b100])
    with pytest.raises(ValueError):
        BitMatrix.from_rows([[1, 0], [1]])


def test_kernel_of_identity_and_zero():
    assert kernel_basis(BitMatrix.identity(4)) == []
    ker = kernel_basis(BitMatrix.zero(1, 3))
    assert sorted(ker) == [1, 2, 4]


def test_kernel_rank_two_four_columns():
    m = BitMatrix.from_strings(["1011", "0110"])
    ker = kernel_basis(m)
    assert len(ker) == 2
    for v in ker:
        assert m.mul_vec(v) == 0


def test_string_round_trip():
    rows = ["101", "011"]
    assert BitMatrix.from_strings(rows).to_strings() == rows
    assert BitMatrix.from_strings(rows).to_rows() == [[1, 0, 1], [0, 1, 1]]


@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + len(kernel_basis(m)) == m.cols


@given(matrices())
def test_kernel_vectors_are_independent_and_annihilated(m):
    ker = kernel_basis(m)
    basis = EchelonBasis()
    for v in ker:
        assert m.mul_vec(v) == 0
        assert basis.add(v)


@given(matrices())
def test_replay_reproduces_rref(m):
    red, _, ops = row_reduce(m)
    assert replay(ops, m.bits) == red.bits


@given(matrices())
def test_rref_shape(m):
    red, pivots, _ = row_reduce(m)
    assert pivots == sorted(pivots)
    for r, p in enumerate(pivots):
        # pivot is the lowest set column of its row and is cleared elsewhere
        assert red.bits[r] & ((1 << (p + 1)) - 1) == 1 << p
        assert all(not (red.bits[o] >> p) & 1 for o in range(m.rows) if o != r)
    assert all(b == 0 for b in red.bits[len(pivots):])


@settings(max_examples=50)
@given(matrices())
def test_row_rank_equals_column_rank(m):
    assert rank(m) == rank(transpose(m))


@given(st.lists(st.integers(0, 255), max_size=12))
def test_echelon_span_membership(vectors):
    basis = EchelonBasis()
    for v in vectors:
        basis.add(v)
    for v in vectors:
        assert v in basis
    acc = 0
    for v in vectors[::2]:
        acc ^= v
    assert acc in basis
    assert len(basis) == rank(BitMatrix(len(vectors), 8, list(vectors)))
