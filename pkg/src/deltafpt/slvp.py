"""Shortest and closest lattice vectors in l_p norms for near-square bases.

The lattice is given by a canonical system (see :mod:`deltafpt.lattice`):
``x = h @ t`` with ``h = [h_b; h_n]``. Writing ``x = (x_b, x_n)``, a vector
``x_b`` lies in the projected lattice iff its Smith residues vanish, and then
``x_n = r @ x_b / delta``. The solver enumerates ``x_b`` digit by digit with
a group dynamic program and reads the tail ``x_n`` off the side constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations, product

import numpy as np

from .errors import ContractError, InvariantViolation
from .exactmat import IntMatrix, det, inverse
from .groupdp import Layer, group_transform, run_group_dp
from .lattice import CanonicalSystem, canonicalize, exceeds_threshold

__all__ = [
    "SlvpInstance",
    "LatticeVector",
    "norm_value",
    "fast_path_duplicate",
    "fast_path_guaranteed",
    "minkowski_terms",
    "minkowski_bound",
    "column_bound",
    "upper_bound_vector",
    "input_basis",
    "certified_box",
    "solve_dp",
    "solve_cvp",
    "oracle_shortest",
    "oracle_closest",
]

INF = math.inf
# rational upper bound for Euler's number
E_UPPER = Fraction(2718281829, 10 ** 9)


def _check_p(p):
    if p == INF:
        return INF
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise ContractError(f"p must be an integer >= 1 or infinity, got {p!r}")
    return p


def norm_value(x, p) -> int | Fraction:
    """``sum |x_i|^p`` for finite p, ``max |x_i|`` for p = inf."""
    if p == INF:
        return max((abs(v) for v in x), default=0)
    return sum(abs(v) ** p for v in x)


def _iroot_ceil(value: int, k: int) -> int:
    """Smallest integer y >= 0 with y**k >= value."""
    if value <= 0:
        return 0
    y = int(round(value ** (1.0 / k))) if value < 2 ** 1000 else 1 << (value.bit_length() // k + 1)
    while y > 0 and (y - 1) ** k >= value:
        y -= 1
    while y ** k < value:
        y += 1
    return y


@dataclass(frozen=True)
class SlvpInstance:
    system: CanonicalSystem
    p: int | float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))

    @classmethod
    def from_matrix(cls, a, p, promised_delta=None) -> "SlvpInstance":
        return cls(canonicalize(a, promised_delta), p)

    @property
    def is_max(self) -> bool:
        return self.p == INF


@dataclass(frozen=True)
class LatticeVector:
    """``x = h @ t`` in canonical row order; ``norm_value`` is the p-th power
    of the norm (or the max-norm itself), for closest-vector results the
    same quantity of ``x - r``."""

    x: tuple[int, ...]
    t: tuple[int, ...]
    norm_value: int | Fraction
    method: str
    stats: dict = field(default_factory=dict, compare=False)


# -- fast path ----------------------------------------------------------

def fast_path_guaranteed(inst: SlvpInstance) -> bool:
    c = inst.system
    return exceeds_threshold(c.n, c.delta_rank, c.m)


def fast_path_duplicate(inst: SlvpInstance) -> LatticeVector | None:
    """A norm-one unit column, or ``h (e_i - e_j)`` for two unit-diagonal
    columns with equal entries below the unit block; None otherwise."""
    c = inst.system
    h, s, n = c.h, c.s, c.n
    keys = [tuple(h[i, j] for i in range(s, c.d)) for j in range(s)]
    for j, key in enumerate(keys):
        if not any(key):
            t = tuple(1 if i == j else 0 for i in range(n))
            return LatticeVector(h @ t, t, 1, "fast-path-unit")
    order = sorted(range(s), key=lambda j: (keys[j], j))
    pairs = [(order[a], order[a + 1]) for a in range(len(order) - 1)
             if keys[order[a]] == keys[order[a + 1]]]
    if not pairs:
        return None
    i, j = min(pairs)
    t = tuple(1 if q == i else (-1 if q == j else 0) for q in range(n))
    return LatticeVector(h @ t, t, 1 if inst.is_max else 2, "fast-path-duplicate")


# -- localization -------------------------------------------------------

def minkowski_terms(inst: SlvpInstance) -> tuple[int, int]:
    """Integer upper bounds for the two localization estimates.

    First: ``delta * (m+1)**(1/p)`` (the last column bound). Second: the
    Minkowski estimate ``2 sqrt(e d / n) (delta / vol)**(1/n)`` where
    ``vol`` lower-bounds the volume of any n-dimensional central section of
    the unit ball: ``2^n`` for the cube, ``2^n/n!`` for p >= 2 (contains a
    Euclidean ball) and ``2^n / n! * d^(-n/2)`` for 1 <= p < 2 when d > n.
    """
    c = inst.system
    n, d, m, dl = c.n, c.d, c.m, c.delta_rank
    p = inst.p
    if inst.is_max:
        t1 = dl
    else:
        t1 = _iroot_ceil(dl ** p * (m + 1), p)
    if inst.is_max:
        vol_sq = Fraction(4 ** n)
    else:
        vol_sq = Fraction(2 ** n, math.factorial(n)) ** 2
        if p < 2 and d > n:
            vol_sq /= d ** n
    # M^(2n) >= 2^(2n) (e d / n)^n (delta / vol)^2
    rhs = Fraction(2 ** (2 * n)) * (E_UPPER * d / n) ** n * Fraction(dl * dl) / vol_sq
    t2 = _iroot_ceil(math.ceil(rhs), 2 * n)
    return max(t1, 1), max(t2, 1)


def minkowski_bound(inst: SlvpInstance) -> int:
    return min(minkowski_terms(inst))


def _column_norms(inst: SlvpInstance):
    h = inst.system.h
    return [norm_value(h.col(j), inst.p) for j in range(h.ncols)]


def column_bound(inst: SlvpInstance) -> int:
    """Integer bound on the max-norm of a shortest vector from the shortest column."""
    best = min(_column_norms(inst))
    return best if inst.is_max else _iroot_ceil(best + 1, inst.p) - 1 if best else 0


def certified_box(system_or_basis, radius: int) -> int:
    """Coefficient box sufficient to enumerate every x with |x|_inf <= radius.

    Accepts a canonical system or any full-column-rank basis matrix; uses
    the nonsingular row subset whose inverse has the smallest row-sum norm.
    """
    if isinstance(system_or_basis, CanonicalSystem):
        blocks = [system_or_basis.h_b]
    else:
        basis = system_or_basis if isinstance(system_or_basis, IntMatrix) else IntMatrix(system_or_basis)
        blocks = [basis.take_rows(rows) for rows in combinations(range(basis.nrows), basis.ncols)]
    best = None
    for blk in blocks:
        if det(blk) == 0:
            continue
        inv = inverse(blk)
        row_norm = max(sum(abs(v) for v in row) for row in inv)
        best = row_norm if best is None else min(best, row_norm)
    return max(1, math.ceil(best * radius))


# -- dynamic program ----------------------------------------------------

def _range_box(lo_hi_per_layer, r_rows):
    """Forward reach of ``r @ z`` for digits in per-coordinate intervals."""
    m = len(r_rows)
    fwd_lo, fwd_hi = [[0] * m], [[0] * m]
    for col, (zl, zh) in enumerate(lo_hi_per_layer):
        lo_row, hi_row = [], []
        for i in range(m):
            a, b = r_rows[i][col] * zl, r_rows[i][col] * zh
            lo_row.append(fwd_lo[-1][i] + min(a, b))
            hi_row.append(fwd_hi[-1][i] + max(a, b))
        fwd_lo.append(lo_row)
        fwd_hi.append(hi_row)
    return fwd_lo, fwd_hi


def _search_system(c: CanonicalSystem) -> CanonicalSystem:
    """Same lattice, re-based on the row set of smallest determinant."""
    return canonicalize(c.h, promised_delta=c.delta_rank, basis="min-det")


def _lattice_dp(sysm: CanonicalSystem, is_max, ranges, cost_of, final_cost, ub, nonzero, backend):
    """Shared driver over ``sysm``: ``ranges[l]`` is the digit interval of
    coordinate l (all d coordinates), ``cost_of(l, z)`` its separable cost.

    Returns the optimal total, every optimal vector (in ``sysm`` row order)
    and table statistics.
    """
    n, m = sysm.n, sysm.m
    tr = group_transform(sysm.h_b, sysm.h_n)
    dl = tr.delta
    r_rows = [list(row) for row in tr.r]
    fwd_lo, fwd_hi = _range_box(ranges[:n], r_rows)
    # eta must end at delta * x_n
    tail = [(dl * ranges[n + i][0], dl * ranges[n + i][1]) for i in range(m)]
    box = [0] * m
    layers = []
    for l in range(n):
        zl, zh = ranges[l]
        digits = tuple(range(zl, zh + 1))
        lo, hi = [], []
        for i in range(m):
            # what remains to be added after layer l
            rem_lo = fwd_lo[n][i] - fwd_lo[l + 1][i]
            rem_hi = fwd_hi[n][i] - fwd_hi[l + 1][i]
            lo.append(max(fwd_lo[l + 1][i], tail[i][0] - rem_hi))
            hi.append(min(fwd_hi[l + 1][i], tail[i][1] - rem_lo))
            box[i] = max(box[i], abs(lo[i]), abs(hi[i]))
        layers.append(Layer(
            digits,
            tuple(cost_of(l, z) for z in digits),
            tr.g_column(l),
            tuple(r_rows[i][l] for i in range(m)),
            tuple(lo),
            tuple(hi),
        ))
    table = run_group_dp(tr.moduli, box, layers, track_nonzero=nonzero,
                         use_max=is_max, ub=ub, backend=backend)
    best = None
    hits = []
    for key, val in table.final_states():
        res, eta, flag = table.decode(key)
        if nonzero and not flag:
            continue
        if any(res) or any(e % dl for e in eta):
            continue
        x_n = tuple(e // dl for e in eta)
        if not all(ranges[n + i][0] <= x_n[i] <= ranges[n + i][1] for i in range(m)):
            continue
        fc = final_cost(x_n)
        total = max(val, fc) if is_max else val + fc
        if ub is not None and total > ub:
            continue
        hits.append((key, x_n, fc))
        if best is None or total < best:
            best = total
    if best is None:
        raise InvariantViolation("dynamic program produced no admissible final state")
    optima = []
    for key, x_n, fc in hits:
        if is_max:
            if fc > best:
                continue
            bound = best
        else:
            bound = best - fc
        for x_b in table.paths_within(key, bound):
            _coefficients(tr, x_b)  # membership of the basis part
            optima.append(x_b + x_n)
    if not optima:
        raise InvariantViolation("no optimal digit sequence could be reconstructed")
    stats = {"states": table.size, "backend": table.backend, "moduli": list(tr.moduli),
             "search_delta": dl}
    return best, optima, stats


def _pick_lexmin(inst_sys: CanonicalSystem, search: CanonicalSystem, optima):
    """Map search-order vectors to instance coordinates; smallest ``t`` wins."""
    inv = inverse(inst_sys.h_b)
    best = None
    for x2 in optima:
        x = search.to_original_rows(x2)
        t = []
        for row in inv:
            v = sum(a * b for a, b in zip(row, x))
            if v.denominator != 1:
                raise InvariantViolation("optimum is not a lattice vector")
            t.append(int(v))
        t = tuple(t)
        if tuple(inst_sys.h @ t) != x:
            raise InvariantViolation("optimum is not a lattice vector")
        if best is None or t < best[0]:
            best = (t, x)
    return best


def _coefficients(tr, x_b) -> tuple[int, ...]:
    t = []
    for row in tr.adj.rows:
        num = sum(a * b for a, b in zip(row, x_b))
        if num % tr.delta:
            raise InvariantViolation("basis part is not in the projected lattice")
        t.append(num // tr.delta)
    return tuple(t)


def input_basis(system: CanonicalSystem) -> IntMatrix:
    """The input's columns in canonical row order (``h @ u^{-1}``)."""
    inv = inverse(system.u)
    return IntMatrix([[sum(row[k] * inv[k][j] for k in range(system.n)) for j in range(system.n)]
                      for row in system.h.rows])


def upper_bound_vector(inst: SlvpInstance) -> tuple[int, ...]:
    """A short nonzero lattice vector: the best {-1,0,1} combination of the
    canonical columns or of the input's columns (pairs only for large n)."""
    c = inst.system
    cands = []
    for basis in (c.h, input_basis(c)):
        cols = [basis.col(j) for j in range(c.n)]
        cands.extend(cols)
        if c.n <= 8:
            arr = np.array(cols, dtype=object)
            for coef in product((-1, 0, 1), repeat=c.n):
                if any(coef):
                    cands.append(tuple(np.array(coef, dtype=object) @ arr))
        else:
            for i in range(c.n):
                for j in range(i + 1, c.n):
                    cands.append(tuple(a + b for a, b in zip(cols[i], cols[j])))
                    cands.append(tuple(a - b for a, b in zip(cols[i], cols[j])))
    return tuple(int(v) for v in min(cands, key=lambda v: (norm_value(v, inst.p), tuple(v))))


def solve_dp(inst: SlvpInstance, bound: int | None = None, backend=None) -> LatticeVector:
    """Shortest nonzero lattice vector (lexicographically smallest ``t`` among ties).

    ``bound`` caps every coordinate of the search; by default the smaller of
    :func:`minkowski_bound` and the max-norm implied by a known short vector.
    """
    c = inst.system
    p = inst.p
    ub = norm_value(upper_bound_vector(inst), p)
    implied = ub if inst.is_max else _iroot_ceil(ub + 1, p) - 1
    if bound is None:
        bound = min(minkowski_bound(inst), implied)
    if bound < 1:
        raise ContractError("coordinate bound must be >= 1")

    def cost(_l, z):
        return abs(z) if inst.is_max else abs(z) ** p

    def tail(x_n):
        return norm_value(x_n, p)

    search = _search_system(c)
    ranges = [(-bound, bound)] * c.d
    best, optima, stats = _lattice_dp(search, inst.is_max, ranges, cost, tail, ub, True, backend)
    t, x = _pick_lexmin(c, search, optima)
    stats["bound"] = bound
    return LatticeVector(x, t, best, "dp", stats)


def _scaled_target(r):
    r = tuple(Fraction(v) for v in r)
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in r), 1)
    return den, tuple(int(v * den) for v in r)


def _scaled_distance(x, den, rs, p):
    return norm_value([den * a - b for a, b in zip(x, rs)], p)


def _rounding_candidate(c: CanonicalSystem, r) -> tuple[int, ...]:
    """Successive rounding on the lower-triangular basis block."""
    t = []
    for i in range(c.n):
        acc = sum(c.h[i, j] * t[j] for j in range(i))
        t.append(round((Fraction(r[i]) - acc) / c.h[i, i]))
    return tuple(c.h @ tuple(t))


def solve_cvp(inst: SlvpInstance, target, backend=None) -> LatticeVector:
    """Closest lattice vector to ``target`` (canonical row order).

    Coordinates are confined to ``|x_l - r_l| <= dist`` where ``dist`` is the
    distance of the best of a few explicit candidates, which is a sound
    localization for any target.
    """
    c = inst.system
    target = tuple(Fraction(v) for v in target)
    if len(target) != c.d:
        raise ContractError(f"target has dimension {len(target)}, expected {c.d}")
    p = inst.p
    den, rs = _scaled_target(target)
    search = _search_system(c)
    rs2 = search.from_original_rows(rs)
    target2 = search.from_original_rows(target)
    cands = [(0,) * c.d, _rounding_candidate(c, target),
             search.to_original_rows(_rounding_candidate(search, target2))]
    ub = min(_scaled_distance(x, den, rs, p) for x in cands)
    # den * |x_l - r_l| <= rad for every coordinate of an optimum
    rad = ub if inst.is_max else _iroot_ceil(ub, p)
    ranges = [(-((rad - v) // den), (v + rad) // den) for v in rs2]

    def cost(l, z):
        v = abs(den * z - rs2[l])
        return v if inst.is_max else v ** p

    def tail(x_n):
        return _scaled_distance(x_n, den, rs2[c.n:], p)

    best, optima, stats = _lattice_dp(search, inst.is_max, ranges, cost, tail, ub, False, backend)
    t, x = _pick_lexmin(c, search, optima)
    scale = den if inst.is_max else den ** p
    return LatticeVector(x, t, Fraction(best, scale), "dp", stats)


# -- oracles ------------------------------------------------------------

def _enumerate_coeffs(n, box):
    """Yield int64 arrays of coefficient vectors in lexicographic order."""
    side = np.arange(-box, box + 1, dtype=np.int64)
    if n == 1:
        yield side.reshape(-1, 1)
        return
    rest = np.stack(np.meshgrid(*([side] * (n - 1)), indexing="ij"), -1).reshape(-1, n - 1)
    for first in side:
        yield np.concatenate([np.full((rest.shape[0], 1), first, dtype=np.int64), rest], axis=1)


def _oracle(inst: SlvpInstance, box: int, score, exclude_zero: bool, basis=None):
    """All minimizers of ``score(basis @ t)`` over the coefficient box, mapped
    to instance coordinates; returns (value, lexicographically smallest t)."""
    c = inst.system
    if box < 1:
        raise ContractError("coefficient box must be >= 1")
    basis = c.h if basis is None else (basis if isinstance(basis, IntMatrix) else IntMatrix(basis))
    if basis.nrows != c.d or basis.ncols != c.n:
        raise ContractError("oracle basis has the wrong shape")
    big = basis.max_abs() * box * c.n
    exact = big ** (2 if inst.is_max else inst.p + 1) * c.d >= 2 ** 62
    hb_obj = np.array(basis.tolist(), dtype=object)
    hb_int = np.array(basis.tolist(), dtype=np.int64)
    best_val, best_x = None, []
    for ts in _enumerate_coeffs(c.n, box):
        if exclude_zero:
            ts = ts[np.any(ts != 0, axis=1)]
            if ts.shape[0] == 0:
                continue
        xs = ts.astype(object) @ hb_obj.T if exact else ts @ hb_int.T
        vals = score(xs)
        lo = int(vals.min())
        if best_val is not None and lo > best_val:
            continue
        rows = [tuple(int(v) for v in xs[i]) for i in np.flatnonzero(vals == lo)]
        if best_val is None or lo < best_val:
            best_val, best_x = lo, rows
        else:
            best_x.extend(rows)
    inv = inverse(c.h_b)
    best_t = None
    for x in best_x:
        t = tuple(sum(a * b for a, b in zip(row, x)) for row in inv)
        if any(v.denominator != 1 for v in t):
            raise ContractError("oracle basis does not generate the instance lattice")
        t = tuple(int(v) for v in t)
        if tuple(c.h @ t) != x:
            raise ContractError("oracle basis does not generate the instance lattice")
        if best_t is None or t < best_t:
            best_t = t
    return best_val, best_t


def oracle_shortest(inst: SlvpInstance, box: int, basis=None) -> LatticeVector:
    """Exhaustive minimum over nonzero ``t`` in ``[-box, box]^n``.

    ``basis`` (default: the canonical ``h``) may be any basis of the same
    lattice in canonical row order; ties are broken in canonical coordinates.
    """
    p = inst.p

    def score(xs):
        a = np.abs(xs)
        return a.max(axis=1) if inst.is_max else (a ** p).sum(axis=1)

    val, t = _oracle(inst, box, score, True, basis)
    return LatticeVector(tuple(inst.system.h @ t), t, int(val), "oracle")


def oracle_closest(inst: SlvpInstance, target, box: int, basis=None) -> LatticeVector:
    p = inst.p
    den, rs = _scaled_target(target)
    shift = np.array(rs, dtype=object)

    def score(xs):
        a = np.abs(xs.astype(object) * den - shift[None, :])
        return a.max(axis=1) if inst.is_max else (a ** p).sum(axis=1)

    val, t = _oracle(inst, box, score, False, basis)
    scale = den if inst.is_max else den ** p
    return LatticeVector(tuple(inst.system.h @ t), t, Fraction(int(val), scale), "oracle")
