from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles as orc
from deltafpt import dpkernel
from deltafpt.errors import DimensionError, RankError
from deltafpt.exactmat import IntMatrix, rank
from deltafpt.ilp import (INFEASIBLE, OPTIMAL, UNBOUNDED, IlpInstance, lp_vertex_optimum, oracle_ilp,
                          proximity_box, proximity_check, solve_ilp)

KNAPSACK = ([[-1, 0], [0, -1], [2, 3]], [0, 0, 5], [1, 1])


@st.composite
def program(draw, max_n=3, max_m=2):
    n = draw(st.integers(1, max_n))
    d = n + draw(st.integers(0, max_m))
    h = draw(st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=d, max_size=d))
    if rank(IntMatrix(h)) < n:
        h = [r[:] for r in h]
        for i in range(n):
            h[i][i] += 9
    b = draw(st.lists(st.integers(-10, 10), min_size=d, max_size=d))
    c = draw(st.lists(st.integers(-4, 4), min_size=n, max_size=n))
    return h, b, c


# -- goldens ------------------------------------------------------------

def test_lp_golden():
    lp = lp_vertex_optimum(IlpInstance.build(*KNAPSACK))
    assert lp.status == OPTIMAL
    assert lp.vertex == (Fraction(5, 2), 0) and lp.basis == (1, 2) and lp.value == Fraction(5, 2)


def test_lp_zero_objective_and_infeasible():
    lp = lp_vertex_optimum(IlpInstance.build(KNAPSACK[0], KNAPSACK[1], [0, 0]))
    assert lp.status == OPTIMAL and lp.value == 0
    assert lp_vertex_optimum(IlpInstance.build([[1], [-1]], [-1, -1], [1])).status == INFEASIBLE


def test_knapsack_golden():
    inst = IlpInstance.build(*KNAPSACK)
    assert inst.delta_rank == orc.max_square_minor(KNAPSACK[0]) == 3
    got = solve_ilp(inst)
    assert (got.status, got.x, got.objective) == (OPTIMAL, (1, 1), 2)
    assert oracle_ilp(inst, [(-5, 5), (-5, 5)]).objective == 2
    rep = proximity_check(inst, got)
    assert rep.passed and rep.ratio <= 1


def test_integral_relaxation():
    # interval matrix: the relaxation vertex is integral already
    inst = IlpInstance.build([[1, 0], [1, 1], [-1, 0], [0, -1]], [3, 5, 0, 0], [1, 2])
    got = solve_ilp(inst)
    assert got.x == tuple(int(v) for v in got.lp_vertex) == (0, 5)
    assert proximity_check(inst, got).max_slack == 0


def test_zero_objective_and_statuses():
    got = solve_ilp(IlpInstance.build(KNAPSACK[0], KNAPSACK[1], [0, 0]))
    assert got.status == OPTIMAL and got.objective == 0
    assert solve_ilp(IlpInstance.build([[1], [-1]], [-1, -1], [1])).status == INFEASIBLE
    unb = solve_ilp(IlpInstance.build([[1, 0], [0, 1]], [0, 0], [-1, 1]))
    assert unb.status == UNBOUNDED and unb.caveat


def test_oracle_goldens():
    assert oracle_ilp(IlpInstance.build([[1], [-1]], [-1, -1], [1]), [(-3, 3)]).status == INFEASIBLE
    point = IlpInstance.build([[1, 0], [-1, 0], [0, 1], [0, -1]], [0, 0, 0, 0], [3, -2])
    res = oracle_ilp(point, [(-2, 2), (-2, 2)])
    assert (res.x, res.objective) == ((0, 0), 0)


def test_input_errors():
    with pytest.raises(DimensionError):
        IlpInstance.build([[1, 0]], [1, 2], [1, 1])
    with pytest.raises(RankError):
        IlpInstance.build([[1, 2], [2, 4]], [1, 1], [1, 1])


# -- properties ------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(program())
def test_matches_oracle(prob):
    h, b, c = prob
    inst = IlpInstance.build(h, b, c)
    got = solve_ilp(inst)
    lp = lp_vertex_optimum(inst)
    assert lp.status == orc.lp_status(h, b, c)
    if lp.status != OPTIMAL:
        assert got.status == lp.status
        return
    rad = orc.proximity_radius(h)
    box = [(int(v) - rad - 1, int(v) + rad + 1) for v in lp.vertex]
    ref = oracle_ilp(inst, box)
    assert (got.status, got.objective) == (ref.status, ref.objective)
    if got.status == OPTIMAL:
        assert all(sum(a * v for a, v in zip(row, got.x)) <= bv for row, bv in zip(h, b))
        assert got.objective == sum(a * v for a, v in zip(c, got.x)) <= lp.value
        assert proximity_check(inst, got).passed
        # slack at the basis rows reproduces x exactly
        hb = [h[i] for i in got.basis]
        assert orc.rational_solve(hb, [b[i] - y for i, y in zip(got.basis, got.slack)]) == got.x


@settings(max_examples=40, deadline=None)
@given(program(2, 1))
def test_proximity_box_contains_optimum(prob):
    inst = IlpInstance.build(*prob)
    lp = lp_vertex_optimum(inst)
    if lp.status != OPTIMAL:
        return
    got = solve_ilp(inst)
    if got.status == OPTIMAL:
        box = proximity_box(inst, lp)
        best = orc.scan_ilp(prob[0], prob[1], prob[2], box)
        assert best[0] == got.objective


@pytest.mark.skipif(not dpkernel.HAVE_COMPILED, reason="compiled kernel not built")
@settings(max_examples=30, deadline=None)
@given(program())
def test_backends_agree(prob):
    inst = IlpInstance.build(*prob)
    a, b = solve_ilp(inst, backend="cython"), solve_ilp(inst, backend="python")
    assert (a.status, a.x, a.objective) == (b.status, b.x, b.objective)
