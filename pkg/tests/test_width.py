import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import assume, given, settings, strategies as st

import oracles as orc
from deltafpt.errors import ContractError, DimensionError, NotASimplexError, ParseError
from deltafpt.exactmat import IntMatrix
from deltafpt.width import (ALL_INFEASIBLE, ANY_FEASIBLE, Family, SimplexInstance, WidthSubproblem, direction_width,
                            load_families, oracle_width, simplex_vertices, solve_subproblem, width_from_subproblems)

DATA = Path(__file__).resolve().parents[1] / "data"
STD = [[-1, 0], [0, -1], [1, 1]]


@st.composite
def simplex(draw):
    """Bounded, full-dimensional: the last normal is minus a positive
    combination of the others and every row has slack at an integer point."""
    n = draw(st.integers(1, 3))
    top = draw(st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n))
    assume(orc.cofactor_det(top) != 0)
    w = draw(st.lists(st.integers(1, 2), min_size=n, max_size=n))
    h = top + [[-sum(w[i] * top[i][j] for i in range(n)) for j in range(n)]]
    x0 = draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
    slack = draw(st.lists(st.integers(1, 4), min_size=n + 1, max_size=n + 1))
    b = [sum(a * v for a, v in zip(row, x0)) + e for row, e in zip(h, slack)]
    return SimplexInstance.build(h, b)


# -- goldens ------------------------------------------------------------

def test_vertex_goldens():
    assert simplex_vertices(SimplexInstance.build(STD, [0, 0, 2])) == ((2, 0), (0, 2), (0, 0))
    assert set(simplex_vertices(SimplexInstance.build(STD, [0, 0, 1]))) == {(0, 0), (1, 0), (0, 1)}


def test_degenerate_simplex():
    # all three lines pass through the origin, so the vertices coincide
    with pytest.raises(NotASimplexError):
        SimplexInstance.build(STD, [0, 0, 0])
    with pytest.raises(NotASimplexError):
        SimplexInstance.build(STD, [0, 0, -1])


def test_direction_width_goldens():
    inst = SimplexInstance.build(STD, [0, 0, 2])
    assert direction_width(inst, (1, 0)) == 2
    assert direction_width(inst, (1, 1)) == 2
    assert direction_width(inst, (1, -1)) == 4
    with pytest.raises(ContractError):
        direction_width(inst, (0, 0))


def test_oracle_width_goldens():
    two = oracle_width(SimplexInstance.build(STD, [0, 0, 2]), 2)
    assert (two.width, two.direction) == (2, (0, 1))
    assert orc.brute_width(orc.simplex_vertex_list(STD, [0, 0, 2]), 2)[0] == 2
    assert oracle_width(SimplexInstance.build(STD, [0, 0, 1]), 2).width == 1


def test_subproblem_goldens():
    ident = IntMatrix.identity(2)
    got = solve_subproblem(WidthSubproblem.build([0, 0], [0, 0], ident))
    assert got.feasible and got.witness == (0, 0)
    got = solve_subproblem(WidthSubproblem.build([0, 0], [2, 2], ident))
    assert got.feasible and all(0 <= v <= 2 for v in got.witness)
    tenths = [Fraction(2, 5)] * 2, [Fraction(3, 5)] * 2
    assert not solve_subproblem(WidthSubproblem.build(*tenths, ident)).feasible


def test_unit_family_agrees_with_oracle():
    inst = SimplexInstance.build(STD, [0, 0, 1])
    n, fams = load_families((DATA / "families_unit.json").read_text())
    assert n == 2
    got = width_from_subproblems(inst, fams)
    assert got.width == oracle_width(inst, 2).width == 1
    assert got.families[0].verdicts[0].witness is not None


def test_empty_simplex_family_warning():
    h = [[-2, 0], [0, -2], [2, 2]]
    inst = SimplexInstance.build(h, [-1, -1, 3])
    assert inst.lattice_empty() and inst.delta() == 4
    _, fams = load_families((DATA / "families_empty.json").read_text())
    got = width_from_subproblems(inst, fams, jobs=2)
    assert len(fams[0].subproblems) == 5
    assert any("lattice-empty" in w for w in got.warnings)
    assert got.width == 1 and got.families[0].rule == ALL_INFEASIBLE


def test_family_errors():
    inst = SimplexInstance.build(STD, [0, 0, 1])
    with pytest.raises(ContractError):
        width_from_subproblems(inst, [])
    with pytest.raises(ParseError):
        load_families("{not json")
    bad = {"n": 2, "families": [{"threshold": "1", "rule": "sometimes", "subproblems": []}]}
    with pytest.raises(ParseError):
        load_families(json.dumps(bad))
    flat = {"n": 3, "families": [{"threshold": "2", "subproblems": [
        {"C": [1, 0, 0, 1], "p": ["0", "0"], "q": ["1/2", "1/2"]}]}]}
    _, fams = load_families(json.dumps(flat))
    assert fams[0].rule == ANY_FEASIBLE and fams[0].subproblems[0].c == IntMatrix.identity(2)


def test_trivially_feasible_family():
    inst = SimplexInstance.build(STD, [0, 0, 2])
    fam = Family(Fraction(2), ANY_FEASIBLE, (WidthSubproblem.build([1], [1], [[1]]),))
    got = width_from_subproblems(inst, [fam])
    assert got.width == 2 and got.families[0].verdicts[0].witness == (1,)


# -- properties ------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(simplex())
def test_width_monotone_in_box(inst):
    widths = [oracle_width(inst, box).width for box in (1, 2, 3)]
    assert widths[0] >= widths[1] >= widths[2]


@settings(max_examples=40, deadline=None)
@given(simplex())
def test_oracle_matches_brute(inst):
    got = oracle_width(inst, 2)
    ref = orc.brute_width(orc.simplex_vertex_list(inst.h.tolist(), inst.b), 2)
    assert got.width == ref[0]
    assert direction_width(inst, got.direction) == got.width


@settings(max_examples=40, deadline=None)
@given(simplex(), st.data())
def test_width_invariant_under_symmetries(inst, data):
    n = inst.n
    perm = data.draw(st.permutations(range(n)))
    signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))
    shift = data.draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    # x' = S x + t with S a signed permutation; then h S^{-1} x' <= b + h S^{-1} t
    s_inv = [[0] * n for _ in range(n)]
    for i, j in enumerate(perm):
        s_inv[j][i] = signs[i]
    h2 = orc.matmul(inst.h.tolist(), s_inv)
    b2 = [bv + sum(a * t for a, t in zip(row, shift)) for row, bv in zip(h2, inst.b)]
    moved = SimplexInstance.build(h2, b2)
    assert oracle_width(moved, 2).width == oracle_width(inst, 2).width


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.data())
def test_subproblem_matches_scan(k, data):
    c = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=k, max_size=k), min_size=k, max_size=k))
    assume(orc.cofactor_det(c) != 0)
    frac = st.fractions(-3, 3, max_denominator=5)
    p = data.draw(st.lists(frac, min_size=k, max_size=k))
    t = data.draw(st.lists(st.fractions(-1, 4, max_denominator=3), min_size=k, max_size=k))
    q = [p[i] + sum(c[i][j] * t[j] for j in range(k)) for i in range(k)]
    got = solve_subproblem(WidthSubproblem.build(p, q, c))
    ref = orc.scan_double_cone(c, p, q)
    assert got.feasible == (ref is not None)
    if got.feasible:
        assert all(v >= 0 for v in orc.cone_coords(c, p, got.witness) + orc.cone_coords(c, got.witness, q))
