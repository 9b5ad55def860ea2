import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cone_surgeon.f2core import (
    F2Matrix,
    F2Vector,
    F2RowSpace,
    kernel_basis,
    rank,
    row_space,
    solve,
)


def dense(rows):
    return F2Matrix.from_dense(rows)


def random_matrix(rng, rows, cols, density=0.4):
    ents = [(r, c) for r in range(rows) for c in range(cols) if rng.random() < density]
    return F2Matrix(rows, cols, ents)


# ---------------------------------------------------------------- matrices


def test_entries_roundtrip():
    M = F2Matrix(2, 3, [(0, 1), (1, 2), (0, 0)])
    assert M.entries == {(0, 0), (0, 1), (1, 2)}
    assert M.row_support(0) == (0, 1)
    assert M.col_weight(1) == 1
    assert M.row_weight(1) == 1


def test_duplicate_entry_rejected():
    with pytest.raises(ValueError):
        F2Matrix(2, 2, [(0, 0), (0, 0)])


def test_out_of_range_entry_rejected():
    with pytest.raises(ValueError):
        F2Matrix(2, 2, [(2, 0)])


def test_transpose_involution():
    M = dense([[1, 1, 0], [0, 1, 1]])
    assert M.transpose().transpose() == M
    assert M.transpose().entries == {(0, 0), (1, 0), (1, 1), (2, 1)}


def test_mul_identity():
    M = dense([[1, 0, 1], [1, 1, 0]])
    assert F2Matrix.identity(2) @ M == M
    assert M @ F2Matrix.identity(3) == M


def test_mul_mod2():
    # [[1,1],[0,1]] @ [[1],[1]] = [[0],[1]] over GF(2)
    A = dense([[1, 1], [0, 1]])
    B = dense([[1], [1]])
    assert (A @ B) == dense([[0], [1]])


def test_stacking():
    A = dense([[1, 0], [0, 1]])
    B = dense([[1, 1], [0, 0]])
    H = F2Matrix.hstack([A, B])
    assert H.rows == 2 and H.cols == 4
    assert H.row_support(0) == (0, 2, 3)
    assert H.row_support(1) == (1,)
    V = F2Matrix.vstack([A, B])
    assert V.rows == 4 and V.cols == 2
    assert V.row_support(2) == (0, 1)


def test_text_roundtrip():
    M = F2Matrix(3, 4, [(0, 3), (2, 0), (2, 2)])
    text = M.to_text()
    assert text.splitlines()[0] == "3 4"
    assert F2Matrix.from_text(text) == M


def test_text_empty_matrix():
    M = F2Matrix.zeros(0, 0)
    assert F2Matrix.from_text(M.to_text()) == M


# -------------------------------------------------------------------- rank


def test_rank_empty():
    assert rank(F2Matrix.zeros(0, 0)) == 0


def test_rank_identity():
    assert rank(F2Matrix.identity(3)) == 3


def test_rank_repeated_rows():
    # [[1,1],[1,1]] has rank 1: the two rows coincide.
    assert rank(dense([[1, 1], [1, 1]])) == 1


def test_rank_wide_incidence():
    # path graph on 4 vertices: incidence matrix has rank n-1
    inc = F2Matrix(4, 3, [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2)])
    assert rank(inc) == 3


def test_rank_matches_transpose_exhaustive_small():
    rng = random.Random(7)
    for _ in range(50):
        M = random_matrix(rng, rng.randrange(0, 6), rng.randrange(0, 6))
        assert rank(M) == rank(M.transpose())


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 2**30))
def test_rank_transpose_property(r, c, seed):
    M = random_matrix(random.Random(seed), r, c)
    assert rank(M) == rank(M.transpose())


def test_rank_wordpacked_wide():
    # above-64-column matrix exercises the multi-word bitmask path
    n = 130
    M = F2Matrix(2, n, [(0, i) for i in range(n)] + [(1, i) for i in range(0, n, 2)])
    assert rank(M) == 2


# ------------------------------------------------------------------ kernel


def test_kernel_identity_empty():
    assert kernel_basis(F2Matrix.identity(2)) == []


def test_kernel_zero_matrix_full():
    basis = kernel_basis(F2Matrix.zeros(2, 3))
    assert len(basis) == 3


def test_kernel_single_vector():
    # all 8 vectors checked by hand: only (1,1,1) lies in the kernel
    M = dense([[1, 1, 0], [0, 1, 1]])
    basis = kernel_basis(M)
    assert [v.support for v in basis] == [(0, 1, 2)]


def test_kernel_vectors_annihilate_and_are_independent():
    rng = random.Random(11)
    for _ in range(40):
        M = random_matrix(rng, rng.randrange(1, 8), rng.randrange(1, 8))
        basis = kernel_basis(M)
        assert len(basis) == M.cols - rank(M)
        space = F2RowSpace(M.cols)
        for v in basis:
            assert M.mul_vec(v).mask == 0
            assert space.add(v.mask)  # independent


# ------------------------------------------------------------------- solve


def test_solve_identity():
    x = solve(F2Matrix.identity(2), F2Vector(2, [0]))
    assert x == F2Vector(2, [0])


def test_solve_unsolvable():
    assert solve(F2Matrix.zeros(2, 2), F2Vector(2, [1])) is None


def test_solve_underdetermined():
    # verify by multiplication rather than pinning which solution is returned
    M = dense([[1, 1]])
    b = F2Vector(1, [0])
    x = solve(M, b)
    assert x is not None and M.mul_vec(x) == b
    assert solve(M, b) == x  # deterministic


def test_solve_dim_mismatch():
    with pytest.raises(ValueError):
        solve(F2Matrix.identity(2), F2Vector(3, [0]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**30))
def test_solve_consistency_property(r, c, seed):
    rng = random.Random(seed)
    M = random_matrix(rng, r, c)
    b = F2Vector.from_mask(r, rng.getrandbits(r))
    x = solve(M, b)
    if x is None:
        aug = F2Matrix.hstack([M, F2Matrix(r, 1, [(i, 0) for i in b.support])])
        assert rank(aug) > rank(M)
    else:
        assert M.mul_vec(x) == b


# ---------------------------------------------------------------- rowspace


def test_rowspace_membership():
    M = dense([[1, 1, 0], [0, 1, 1]])
    space = row_space(M)
    assert space.dim == 2
    assert space.contains(0b101)  # sum of the two rows
    assert not space.contains(0b100)


def test_vector_validation():
    with pytest.raises(ValueError):
        F2Vector(2, [2])
    with pytest.raises(ValueError):
        F2Vector(2, [0, 0])
    v = F2Vector(5, [4, 1])
    assert v.support == (1, 4)
    assert v.weight() == 2
