from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles as orc
from deltafpt.errors import DimensionError, RankError
from deltafpt.exactmat import IntMatrix, rank
from deltafpt.lattice import (canonicalize, check_entry_bound, check_row_threshold, check_sub_rank_bound,
                              exceeds_threshold, nontrivial_diagonal_sum_ok)


@st.composite
def full_rank(draw, max_n=4, max_m=2, bound=4):
    n = draw(st.integers(1, max_n))
    d = n + draw(st.integers(0, max_m))
    rows = draw(st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                         min_size=d, max_size=d))
    if rank(IntMatrix(rows)) < n:
        rows = [r[:] for r in rows]
        for i in range(n):
            rows[i][i] += 4 * bound + 1
    return rows


def test_identity_golden():
    c = canonicalize(IntMatrix.identity(3))
    assert (c.s, c.k, c.delta, c.delta_rank) == (3, 0, 1, 1)
    assert c.h == IntMatrix.identity(3) and c.h_n is None


def test_two_by_two_golden():
    c = canonicalize([[2, 4], [1, 3]])
    assert c.h_b.tolist() == [[1, 0], [0, 2]]
    assert (c.s, c.k, c.delta, c.delta_rank) == (1, 1, 2, 2)


def test_extra_row_golden():
    c = canonicalize([[1, 0], [0, 1], [5, 7]])
    assert c.h_b == IntMatrix.identity(2)
    assert c.h_n.tolist() == [[5, 7]] and c.m == 1


def test_rank_error():
    with pytest.raises(RankError):
        canonicalize([[1, 2], [2, 4]])


def test_entry_bound_goldens():
    assert check_entry_bound(canonicalize(IntMatrix.identity(2))).hn_max is None
    rep = check_entry_bound(canonicalize([[1, 0], [0, 1], [5, 7]]))
    assert rep.delta_rank == orc.max_square_minor([[1, 0], [0, 1], [5, 7]]) == 7
    assert rep.hn_max == 7 and rep.passed


@pytest.mark.xfail(strict=True, reason="at Delta = 1 the bound is 1/2, below the 1 x 1 minor 1")
def test_sub_rank_identity_plus_row_passes():
    assert check_sub_rank_bound(canonicalize([[1, 0], [0, 1], [1, 1]])).passed


def test_sub_rank_goldens():
    rep = check_sub_rank_bound(canonicalize([[1, 0], [0, 1], [1, 1]]))
    assert (rep.minor_max, rep.delta_rank, rep.passed) == (1, 1, False)
    # a 4 x 3 instance with Delta = 2: the bound is 2 * (1 + 1) = 4
    a = [[1, 0, 0], [0, 1, 0], [0, 0, 2], [1, 1, 1]]
    rep = check_sub_rank_bound(canonicalize(a))
    assert rep.delta_rank == 2 and rep.minor_max <= 4 and rep.passed
    with pytest.raises(DimensionError):
        check_sub_rank_bound(canonicalize(IntMatrix.identity(2)))


def test_row_threshold_goldens():
    rep = check_row_threshold(IntMatrix.identity(4))
    assert rep.rows_ok and rep.d <= rep.n + 1
    rep = check_row_threshold(IntMatrix.identity(5))
    assert not rep.threshold_met
    assert not exceeds_threshold(5, 1, 2) and exceeds_threshold(10, 1, 2)
    # a singular n x n submatrix: the predicate does not apply
    assert not check_row_threshold([[1, 0], [0, 1], [1, 0]]).applicable


def test_promised_delta_is_trusted():
    c = canonicalize([[1, 0], [0, 1], [5, 7]], promised_delta=9)
    assert c.delta_rank == 9 and c.delta_promised
    assert check_entry_bound(c).delta_promised


@settings(max_examples=60, deadline=None)
@given(full_rank())
def test_canonical_invariants(a):
    c = canonicalize(a)
    h = c.h.tolist()
    n = c.n
    # reordered input rows times u give h
    permuted = [a[r] for r in c.row_perm]
    assert orc.matmul(permuted, c.u.tolist()) == h
    assert abs(orc.cofactor_det(c.u.tolist())) == 1
    # lower triangular block, unit entries first, reduced rows
    assert all(h[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    diag = list(c.diagonal)
    assert diag[:c.s] == [1] * c.s and all(v > 1 for v in diag[c.s:])
    assert all(0 <= h[i][j] < h[i][i] for i in range(n) for j in range(i))
    assert c.delta == abs(orc.cofactor_det(h[:n])) <= c.delta_rank == orc.max_square_minor(a)
    if c.k >= 1:
        assert nontrivial_diagonal_sum_ok(c)
    # two-sided lattice membership modulo the row permutation
    for col in zip(*permuted):
        assert orc.in_lattice(h, col)
    for col in zip(*h):
        assert orc.in_lattice(permuted, col)


@settings(max_examples=40, deadline=None)
@given(full_rank())
def test_canonicalize_idempotent(a):
    c = canonicalize(a)
    again = canonicalize(c.h)
    assert again.h == c.h
    assert again.row_perm == tuple(range(c.d)) and again.col_perm == tuple(range(c.n))


@settings(max_examples=40, deadline=None)
@given(full_rank(4, 2, 2))
def test_entry_bound_holds(a):
    c = canonicalize(a)
    rep = check_entry_bound(c)
    assert rep.within_delta
    if c.m:
        assert rep.hn_max == max(abs(v) for row in c.h.tolist()[c.n:] for v in row)
        assert rep.refined_bound == Fraction(c.delta_rank, c.delta) * (Fraction(2 * c.delta, 2 ** c.k) + c.k - 1)
