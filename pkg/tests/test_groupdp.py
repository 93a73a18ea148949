import itertools

import pytest
from hypothesis import given, settings, strategies as st

from deltafpt import dpkernel
from deltafpt.errors import TableTooLargeError
from deltafpt.exactmat import IntMatrix
from deltafpt.groupdp import Layer, group_transform, run_group_dp

BACKENDS = ["python"] + (["cython"] if dpkernel.HAVE_COMPILED else [])


@st.composite
def dp_problem(draw):
    moduli = tuple(draw(st.lists(st.integers(2, 4), max_size=2)))
    m = draw(st.integers(0, 2))
    box = tuple(draw(st.lists(st.integers(1, 4), min_size=m, max_size=m)))
    layers = []
    for _ in range(draw(st.integers(1, 3))):
        digits = tuple(range(-draw(st.integers(0, 2)), draw(st.integers(0, 2)) + 1))
        costs = tuple(draw(st.integers(0, 5)) if z else 0 for z in digits)
        gstep = tuple(draw(st.integers(0, mod - 1)) for mod in moduli)
        estep = tuple(draw(st.integers(-2, 2)) for _ in box)
        lo = tuple(-b for b in box)
        layers.append(Layer(digits, costs, gstep, estep, lo, box))
    return moduli, box, tuple(layers), draw(st.booleans()), draw(st.booleans())


def brute_final(moduli, box, layers, track_nonzero, use_max):
    """Best value per final (gamma, eta, flag) over every digit sequence."""
    out = {}
    for seq in itertools.product(*(layer.digits for layer in layers)):
        gamma = [0] * len(moduli)
        eta = [0] * len(box)
        val = 0
        ok = True
        for z, layer in zip(seq, layers):
            cost = layer.costs[layer.digits.index(z)]
            gamma = [(g + z * s) % mod for g, s, mod in zip(gamma, layer.gamma_step, moduli)]
            eta = [e + z * s for e, s in zip(eta, layer.eta_step)]
            if any(not (lo <= e <= hi) for e, lo, hi in zip(eta, layer.lo, layer.hi)):
                ok = False
                break
            val = max(val, cost) if use_max else val + cost
        if not ok:
            continue
        flag = int(any(seq)) if track_nonzero else 0
        key = (tuple(gamma), tuple(eta), flag)
        out[key] = min(out.get(key, val), val)
    return out


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=60, deadline=None)
@given(dp_problem())
def test_matches_brute_force(backend, prob):
    moduli, box, layers, track, use_max = prob
    table = run_group_dp(moduli, box, layers, track_nonzero=track, use_max=use_max, backend=backend)
    got = {table.decode(k): v for k, v in table.final_states()}
    assert got == brute_final(*prob)
    # every final value is achieved by its reconstructed digits
    for key, val in table.final_states():
        digits = table.backtrack(key)
        cost = 0
        for layer, z in zip(layers, digits):
            c = layer.costs[layer.digits.index(z)]
            cost = max(cost, c) if use_max else cost + c
        assert cost == val


@pytest.mark.skipif(not dpkernel.HAVE_COMPILED, reason="compiled kernel not built")
@settings(max_examples=60, deadline=None)
@given(dp_problem(), st.one_of(st.none(), st.integers(0, 8)))
def test_backends_agree(prob, ub):
    moduli, box, layers, track, use_max = prob
    a = run_group_dp(moduli, box, layers, track_nonzero=track, use_max=use_max, ub=ub, backend="python")
    b = run_group_dp(moduli, box, layers, track_nonzero=track, use_max=use_max, ub=ub, backend="cython")
    assert a.tables == b.tables


def test_codec_round_trip():
    table = run_group_dp((2, 3), (2,), (Layer((0, 1), (0, 1), (1, 1), (1,), (-2,), (2,)),))
    for g in itertools.product(range(2), range(3)):
        for e in range(-2, 3):
            for flag in (0, 1):
                assert table.decode(table.encode(g, (e,), flag)) == (g, (e,), flag)
    assert table.dense_size == 1 * 6 * 5 * 2


def test_table_cap(monkeypatch):
    layer = Layer(tuple(range(-3, 4)), (0,) * 7, (1,), (1,), (-9,), (9,))
    monkeypatch.setenv("DELTAFPT_MAX_TABLE", "3")
    with pytest.raises(TableTooLargeError):
        run_group_dp((7,), (9,), (layer, layer))


def test_group_transform_membership():
    h_b = IntMatrix([[2, 0], [1, 3]])
    tr = group_transform(h_b)
    assert tr.delta == 6 and tr.moduli == (6,)
    assert h_b @ tr.adj == IntMatrix.diag([6, 6])
    for v in itertools.product(range(-6, 7), repeat=2):
        # v = h_b t  <=>  t0 = v0 / 2 and t1 = (v1 - t0) / 3 are integers
        member = v[0] % 2 == 0 and (v[1] - v[0] // 2) % 3 == 0
        assert (tr.residues(v) == (0,)) == member, v
