from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles as orc
from deltafpt.errors import DimensionError, RankError, SingularMatrixError
from deltafpt.exactmat import (IntMatrix, adjugate, delta, det, hnf, inverse, max_minor_abs, rank, ratvec,
                               snf, solve_rational)

entries = st.integers(-9, 9)


@st.composite
def square(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n))


@st.composite
def full_column_rank(draw, max_n=4, max_d=6):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(n, max_d))
    rows = draw(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=d, max_size=d))
    if rank(IntMatrix(rows)) < n:
        rows = [r[:] for r in rows]
        for i in range(n):
            rows[i][i] += 37  # strongly diagonal leading block
    return rows


# -- goldens ------------------------------------------------------------

@pytest.mark.parametrize("a, want", [
    (IntMatrix.identity(3), 1),
    ([[2, 1], [1, 2]], 3),
    ([[2, 4], [1, 2]], 0),
])
def test_det_goldens(a, want):
    assert det(a) == want


@pytest.mark.parametrize("a, want", [
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
    ([[2, 0], [0, 3]], [[3, 0], [0, 2]]),
    ([[1, 2], [3, 4]], [[4, -2], [-3, 1]]),
])
def test_adjugate_goldens(a, want):
    assert adjugate(a).tolist() == want


def test_max_minor_goldens():
    assert max_minor_abs(IntMatrix.identity(2), 2) == 1
    assert max_minor_abs([[-1, 0], [0, -1], [2, 3]], 2) == 3
    a = IntMatrix([[1, -7], [4, 2]])
    assert max_minor_abs(a, 1) == a.max_abs() == 7
    with pytest.raises(DimensionError):
        max_minor_abs(a, 3)


def test_hnf_goldens():
    r = hnf(IntMatrix.identity(2))
    assert r.h == IntMatrix.identity(2) and r.u == IntMatrix.identity(2)
    assert hnf([[2, 4], [1, 3]]).h.tolist() == [[2, 0], [0, 1]]
    assert hnf([[3, 0], [0, 3]]).h.tolist() == [[3, 0], [0, 3]]


def test_hnf_rank_error_names_columns():
    with pytest.raises(RankError) as info:
        hnf([[1, 2], [2, 4], [3, 6]])
    assert info.value.dependent_columns == (0, 1)


@pytest.mark.parametrize("a, diag", [
    (IntMatrix.identity(3), (1, 1, 1)),
    ([[2, 0], [0, 1]], (1, 2)),
    ([[2, 0], [1, 3]], (1, 6)),
])
def test_snf_goldens(a, diag):
    assert snf(a).diagonal == diag


def test_snf_singular():
    with pytest.raises(SingularMatrixError):
        snf([[1, 2], [2, 4]])


@pytest.mark.parametrize("a, b, want", [
    (IntMatrix.identity(2), [3, Fraction(1, 2)], (3, Fraction(1, 2))),
    ([[2, 0], [0, 4]], [1, 1], (Fraction(1, 2), Fraction(1, 4))),
    ([[1, 2], [3, 4]], [1, 0], (-2, Fraction(3, 2))),
])
def test_solve_rational_goldens(a, b, want):
    assert solve_rational(a, b) == want


def test_errors_and_construction():
    with pytest.raises(DimensionError):
        det([[1, 2, 3]])
    with pytest.raises(SingularMatrixError):
        solve_rational([[1, 1], [1, 1]], [0, 0])
    with pytest.raises(DimensionError):
        IntMatrix([])
    with pytest.raises(DimensionError):
        IntMatrix([[1, 2], [3]])
    assert ratvec(["3/6", 2]) == (Fraction(1, 2), Fraction(2))


def test_big_integers_stay_exact():
    big = 10 ** 40
    a = IntMatrix([[big, 1], [1, big]])
    assert det(a) == big * big - 1
    assert a @ adjugate(a) == IntMatrix.diag([det(a)] * 2)


# -- properties ------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(square())
def test_det_matches_cofactor(a):
    assert det(a) == orc.cofactor_det(a)


@settings(max_examples=60, deadline=None)
@given(square(4))
def test_adjugate_identity(a):
    adj = adjugate(a)
    assert adj.tolist() == orc.cofactor_adjugate(a)
    d = det(a)
    m = IntMatrix(a)
    assert m @ adj == IntMatrix.diag([d] * m.nrows) == adj @ m


@settings(max_examples=60, deadline=None)
@given(full_column_rank())
def test_hnf_properties(a):
    res = hnf(a)
    h, u = res.h.tolist(), res.u.tolist()
    assert orc.matmul(a, u) == h
    assert abs(orc.cofactor_det(u)) == 1
    for c, r in enumerate(res.pivot_rows):
        assert h[r][c] > 0
        assert all(h[rr][c] == 0 for rr in range(r))
        assert all(0 <= h[r][j] < h[r][c] for j in range(c))
    # lattice equality: columns of each lie in the other
    for col in zip(*a):
        assert orc.in_lattice(h, col)
    for col in zip(*h):
        assert orc.in_lattice(a, col)


@settings(max_examples=60, deadline=None)
@given(square(4))
def test_snf_properties(a):
    if orc.cofactor_det(a) == 0:
        return
    res = snf(a)
    s = res.s.tolist()
    n = len(a)
    assert orc.matmul(orc.matmul(res.p_inv.tolist(), s), res.q_inv.tolist()) == a
    assert abs(det(res.p_inv)) == abs(det(res.q_inv)) == 1
    assert list(res.diagonal) == orc.smith_invariants(a)
    prod = 1
    for v in res.diagonal:
        prod *= v
    assert prod == abs(orc.cofactor_det(a))
    assert all(s[i][j] == 0 for i in range(n) for j in range(n) if i != j)


@settings(max_examples=40, deadline=None)
@given(square(4))
def test_inverse_and_solve(a):
    if orc.cofactor_det(a) == 0:
        return
    inv = inverse(a)
    n = len(a)
    prod = [[sum(Fraction(a[i][k]) * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert prod == [[int(i == j) for j in range(n)] for i in range(n)]
    b = [i - 2 for i in range(n)]
    x = solve_rational(a, b)
    assert tuple(sum(a[i][j] * x[j] for j in range(n)) for i in range(n)) == tuple(b)


@settings(max_examples=40, deadline=None)
@given(full_column_rank(3, 5), st.data())
def test_max_minor_monotone_under_row_deletion(a, data):
    k = data.draw(st.integers(1, len(a[0])))
    if len(a) <= k:
        return
    drop = data.draw(st.integers(0, len(a) - 1))
    rest = [r for i, r in enumerate(a) if i != drop]
    assert max_minor_abs(rest, k) <= max_minor_abs(a, k) == orc.max_minor(a, k)
    assert delta(a) == orc.max_minor(a, len(a[0]))
