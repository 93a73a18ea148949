"""Seeded solver-versus-oracle sweeps exposed through ``deltafpt suite``.

Each suite draws ``count`` random desk-scale instances from
``random.Random(seed)`` and compares the fast route with the exhaustive one.
The payload lists counts and the first few mismatching instances.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import product

from .exactmat import IntMatrix, det, inverse, rank

__all__ = ["SUITES", "random_full_rank"]

MAX_ORACLE_POINTS = 2_000_000


def random_full_rank(rng: random.Random, d: int, n: int, bound: int) -> IntMatrix:
    while True:
        a = IntMatrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(d)])
        if rank(a) == n:
            return a


def _summary(checked, mismatches, skipped=0):
    return {"checked": checked, "skipped": skipped, "mismatches": len(mismatches),
            "examples": mismatches[:5]}


def suite_slvp(seed: int, count: int):
    from .slvp import SlvpInstance, _iroot_ceil, certified_box, input_basis, norm_value, oracle_shortest, solve_dp

    rng = random.Random(seed)
    bad, checked, skipped = [], 0, 0
    for _ in range(count):
        n, m = rng.randint(1, 4), rng.randint(0, 2)
        a = random_full_rank(rng, n + m, n, 4)
        p = rng.choice([1, 2, math.inf])
        inst = SlvpInstance.from_matrix(a, p)
        basis = input_basis(inst.system)
        shortest_col = min(norm_value(basis.col(j), p) for j in range(n))
        # a shortest vector has max-norm at most the p-th root of this value
        radius = shortest_col if p == math.inf else _iroot_ceil(shortest_col + 1, p) - 1
        box = certified_box(basis, radius)
        if (2 * box + 1) ** n > MAX_ORACLE_POINTS:
            skipped += 1
            continue
        got = solve_dp(inst)
        ref = oracle_shortest(inst, box, basis)
        checked += 1
        if got.norm_value != ref.norm_value:
            bad.append({"matrix": a.tolist(), "norm": p, "dp": got.norm_value, "oracle": ref.norm_value})
    return _summary(checked, bad, skipped)


def suite_ilp(seed: int, count: int):
    from .ilp import OPTIMAL, IlpInstance, lp_vertex_optimum, oracle_ilp, proximity_box, proximity_check, solve_ilp

    rng = random.Random(seed)
    bad, checked, optimal = [], 0, 0
    for _ in range(count):
        n, m = rng.randint(1, 4), rng.randint(0, 2)
        h = random_full_rank(rng, n + m, n, 4)
        b = [rng.randint(-10, 10) for _ in range(n + m)]
        c = [rng.randint(-4, 4) for _ in range(n)]
        inst = IlpInstance.build(h, b, c)
        got = solve_ilp(inst)
        checked += 1
        lp = lp_vertex_optimum(inst)
        if lp.status != OPTIMAL:
            if got.status != lp.status:
                bad.append({"h": h.tolist(), "b": b, "c": c, "dp": got.status, "relaxation": lp.status})
            continue
        ref = oracle_ilp(inst, proximity_box(inst, lp))
        ok = got.status == ref.status and got.objective == ref.objective
        if ok and got.status == OPTIMAL:
            optimal += 1
            ok = proximity_check(inst, got).passed
        if not ok:
            bad.append({"h": h.tolist(), "b": b, "c": c, "dp": [got.status, got.objective],
                        "oracle": [ref.status, ref.objective]})
    out = _summary(checked, bad)
    out["optimal"] = optimal
    return out


def _random_rational(rng, den_max=7, span=4):
    den = rng.randint(1, den_max)
    return Fraction(rng.randint(-span * den, span * den), den)


def suite_enum_par(seed: int, count: int):
    from .geom import ParInstance, enumerate_par

    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        n = rng.randint(1, 3)
        while True:
            a = IntMatrix([[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)])
            if det(a) != 0:
                break
        p = tuple(_random_rational(rng) for _ in range(n))
        got = enumerate_par(ParInstance.build(a, p))
        # grid scan over the bounding box of the cell's corners
        corners = [[sum(a[i, j] * t[j] for j in range(n)) + p[i] for i in range(n)]
                   for t in product((0, 1), repeat=n)]
        lo = [math.floor(min(cn[i] for cn in corners)) for i in range(n)]
        hi = [math.ceil(max(cn[i] for cn in corners)) for i in range(n)]
        ref = []
        inv = inverse(a)
        for x in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
            t = [sum(r * (xv - pv) for r, xv, pv in zip(row, x, p)) for row in inv]
            if all(0 <= v < 1 for v in t):
                ref.append(x)
        if list(got.points) != ref or not got.bounds_hold:
            bad.append({"a": a.tolist(), "p": p, "count": got.count, "scan": len(ref)})
    return _summary(count, bad)


def suite_width_sub(seed: int, count: int):
    from .width import WidthSubproblem, solve_subproblem

    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        k = rng.randint(1, 3)
        while True:
            c = IntMatrix([[rng.randint(-3, 3) for _ in range(k)] for _ in range(k)])
            if det(c) != 0:
                break
        p = [_random_rational(rng, 5, 3) for _ in range(k)]
        # q = p + c t; a negative entry of t makes the intersection empty
        t = [Fraction(rng.randint(-1, 6), rng.randint(1, 3)) for _ in range(k)]
        q = [pi + sum(c[i, j] * t[j] for j in range(k)) for i, pi in enumerate(p)]
        sub = WidthSubproblem.build(p, q, c)
        got = solve_subproblem(sub)
        corners = [[p[i] + sum(c[i, j] * t[j] * e[j] for j in range(k)) for i in range(k)]
                   for e in product((0, 1), repeat=k)]
        lo = [math.floor(min(cn[i] for cn in corners)) for i in range(k)]
        hi = [math.ceil(max(cn[i] for cn in corners)) for i in range(k)]
        scan = any(sub.in_both_cones(x) for x in product(*(range(l, h + 1) for l, h in zip(lo, hi))))
        if got.feasible != scan:
            bad.append({"c": c.tolist(), "p": p, "q": q, "solver": got.feasible, "scan": scan})
    return _summary(count, bad)


SUITES = {
    "slvp": suite_slvp,
    "ilp": suite_ilp,
    "enum-par": suite_enum_par,
    "width-sub": suite_width_sub,
}
