import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from frobmult.exactlin import (FieldSpec, ScalarMatrix, from_text, image_basis, kernel_basis, nullity, rank,
                               rank_bits, rref, to_text)

PRIMES = [2, 3, 5, 7]


@st.composite
def matrices(draw, primes=PRIMES, max_side=9):
    p = draw(st.sampled_from(primes))
    r = draw(st.integers(0, max_side))
    c = draw(st.integers(0, max_side))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    return ScalarMatrix.from_rows(rows, p, cols=c)


def sympy_rank(m: ScalarMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    K = GF(m.p)
    return DomainMatrix([[K(x) for x in row] for row in m.tolist()], (m.rows, m.cols), K).rank()


def test_fieldspec_rejects_composites():
    with pytest.raises(ValueError):
        FieldSpec(4)
    with pytest.raises(ValueError):
        FieldSpec(1)
    assert FieldSpec(5).inv(2) == 3


def test_rank_examples():
    assert rank(ScalarMatrix.identity(7, 2)) == 7
    assert rank(ScalarMatrix.zeros(3, 4, 5)) == 0
    # [[1,1],[1,1]] is rank 1 in every characteristic
    for p in PRIMES:
        assert rank(ScalarMatrix.from_rows([[1, 1], [1, 1]], p)) == 1
    # the all-ones 3x3 minus identity is singular exactly in characteristic 2
    m = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert rank(ScalarMatrix.from_rows(m, 2)) == 2
    assert rank(ScalarMatrix.from_rows(m, 3)) == 3


def test_rank_bits_matches_packed_rows():
    assert rank_bits([0b011, 0b110, 0b101]) == 2
    assert rank_bits([]) == 0


def test_rref_pivots_and_identity_block():
    m = ScalarMatrix.from_rows([[0, 2, 4], [0, 1, 2], [1, 0, 1]], 5)
    red, piv = rref(m)
    assert piv == [0, 1]
    assert red.tolist()[:2] == [[1, 0, 1], [0, 1, 2]]
    assert red.tolist()[2] == [0, 0, 0]


def test_kernel_of_identity_and_zero():
    assert kernel_basis(ScalarMatrix.identity(4, 3)) == []
    assert len(kernel_basis(ScalarMatrix.zeros(2, 5, 2))) == 5


def test_text_roundtrip():
    m = ScalarMatrix.from_rows([[1, 0, 2], [2, 2, 0]], 3)
    assert from_text(to_text(m)) == m
    with pytest.raises(ValueError):
        from_text("")


def test_block_assembly():
    a = ScalarMatrix.identity(2, 2)
    grid = [[a, None], [None, a]]
    assert ScalarMatrix.block(grid, [2, 2], [2, 2], 2) == ScalarMatrix.identity(4, 2)


@given(matrices())
def test_rank_matches_independent_oracle(m):
    assert rank(m) == sympy_rank(m)


@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + nullity(m) == m.cols
    assert len(kernel_basis(m)) == m.cols - rank(m)


@given(matrices())
def test_kernel_vectors_are_annihilated(m):
    arr = m.to_numpy()
    for v in kernel_basis(m):
        assert not (arr @ np.array(v, dtype=np.int64) % m.p).any()


@given(matrices())
def test_rank_of_transpose(m):
    assert rank(m.transpose()) == rank(m)


@given(matrices())
def test_rref_is_idempotent(m):
    red, piv = rref(m)
    red2, piv2 = rref(red)
    assert red2 == red and piv2 == piv
    assert len(piv) == rank(m)


@given(matrices())
def test_image_basis_spans_column_space(m):
    cols = image_basis(m)
    assert len(cols) == rank(m)
    if cols:
        assert rank(ScalarMatrix.from_columns(cols, m.rows, m.p)) == len(cols)


@given(matrices(max_side=6), st.data())
def test_product_rank_bound(a, data):
    c = data.draw(st.integers(0, 6))
    rows = data.draw(st.lists(st.lists(st.integers(0, a.p - 1), min_size=c, max_size=c),
                              min_size=a.cols, max_size=a.cols))
    b = ScalarMatrix.from_rows(rows, a.p, cols=c)
    assert rank(a @ b) <= min(rank(a), rank(b))
