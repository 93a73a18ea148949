"""Integer programs ``max c.x  s.t.  h x <= b`` with few more rows than columns.

The solver starts from an optimal vertex of the linear relaxation, rewrites
the program in the slack variables ``y = b_B - h_B x`` of the basis rows and
minimises the (delta-scaled) objective over ``y`` with a group dynamic
program: ``x`` is integral iff ``y`` satisfies Smith congruences, and the
non-basis rows become linear side constraints on ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import math

from .errors import ContractError, DimensionError, InvariantViolation
from .exactmat import IntMatrix, delta as compute_delta, det, rank, solve_rational
from .groupdp import Layer, group_transform, run_group_dp

__all__ = [
    "IlpInstance",
    "LpResult",
    "IlpResult",
    "ProximityReport",
    "lp_vertex_optimum",
    "solve_ilp",
    "oracle_ilp",
    "proximity_box",
    "proximity_check",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

TIE_LIMIT = 4096


@dataclass(frozen=True)
class IlpInstance:
    h: IntMatrix
    b: tuple[int, ...]
    c: tuple[int, ...]
    delta_rank: int

    @classmethod
    def build(cls, h, b, c, promised_delta: int | None = None) -> "IlpInstance":
        h = h if isinstance(h, IntMatrix) else IntMatrix(h)
        b = tuple(int(v) for v in b)
        c = tuple(int(v) for v in c)
        d, n = h.shape
        if len(b) != d or len(c) != n:
            raise DimensionError(f"h is {d}x{n} but b has {len(b)} and c has {len(c)} entries")
        if rank(h) < n:
            from .exactmat import hnf

            hnf(h)  # raises the rank error naming dependent columns
        dl = int(promised_delta) if promised_delta is not None else compute_delta(h)
        return cls(h, b, c, dl)

    @property
    def n(self) -> int:
        return self.h.ncols

    @property
    def d(self) -> int:
        return self.h.nrows


@dataclass(frozen=True)
class LpResult:
    status: str
    vertex: tuple[Fraction, ...] | None = None
    basis: tuple[int, ...] | None = None
    value: Fraction | None = None


@dataclass(frozen=True)
class IlpResult:
    status: str
    x: tuple[int, ...] | None = None
    objective: int | None = None
    lp_vertex: tuple[Fraction, ...] | None = None
    slack: tuple[int, ...] | None = None
    basis: tuple[int, ...] | None = None
    caveat: str | None = None
    tie_break_exhaustive: bool = True
    stats: dict = field(default_factory=dict, compare=False)


# -- linear relaxation ----------------------------------------------------

def _lp(rows, b, c) -> LpResult:
    """Exact LP by enumerating row bases in lexicographic order.

    Returns the first basis that is primal and dual feasible (hence
    optimal, with nonnegative reduced costs). Infeasible when no basis is
    primal feasible; unbounded when none is dual feasible.
    """
    h = IntMatrix(rows)
    d, n = h.shape
    primal_ok = dual_ok = False
    for basis in combinations(range(d), n):
        hb = h.take_rows(basis)
        if det(hb) == 0:
            continue
        y = solve_rational(hb.T, c)
        dual = all(v >= 0 for v in y)
        v = solve_rational(hb, [b[i] for i in basis])
        primal = all(sum(a * x for a, x in zip(h.row(i), v)) <= b[i] for i in range(d))
        if primal and dual:
            return LpResult(OPTIMAL, v, basis, sum(a * x for a, x in zip(c, v)))
        primal_ok |= primal
        dual_ok |= dual
    if not primal_ok:
        return LpResult(INFEASIBLE)
    if not dual_ok:
        return LpResult(UNBOUNDED)
    raise InvariantViolation("feasible and bounded relaxation without an optimal basis")


def lp_vertex_optimum(inst: IlpInstance) -> LpResult:
    """Optimal vertex of the relaxation with its witness basis."""
    return _lp(inst.h.rows, inst.b, inst.c)


def _branch_value(inst: IlpInstance, row: int, shift: int):
    """LP optimum with row ``row`` tightened by ``shift``; None if infeasible."""
    b = list(inst.b)
    b[row] -= shift
    res = _lp(inst.h.rows, b, inst.c)
    if res.status == INFEASIBLE:
        return None
    if res.status == UNBOUNDED:
        raise InvariantViolation("tightened relaxation became unbounded")
    return res.value


# -- group dynamic program ------------------------------------------------

def _reduced_costs(inst, tr):
    """``delta * c^T h_B^{-1}``; nonnegative at an optimal basis (dual feasibility)."""
    n = inst.n
    wd = [sum(inst.c[i] * tr.adj[i, j] for i in range(n)) for j in range(n)]
    if any(v < 0 for v in wd):
        raise InvariantViolation("basis of the relaxation is not dual feasible")
    return wd


def _dp_window(inst, tr, order, rest, caps, ub, backend):
    """Minimise ``wd . y`` over slacks ``0 <= y_j <= caps[j]`` satisfying the
    congruences and the scaled non-basis rows. Returns (value, optimal y's,
    whether the tie enumeration was complete, states)."""
    n = inst.n
    m = len(rest)
    dl = tr.delta
    b_b = [inst.b[i] for i in order]
    b_n = [inst.b[i] for i in rest]
    wd = _reduced_costs(inst, tr)
    neg_r = [[-v for v in row] for row in tr.r]
    rhs = [dl * b_n[i] - sum(tr.r[i][j] * b_b[j] for j in range(n)) for i in range(m)]
    clamp = n * n * inst.delta_rank ** 2
    rho = [min(v, clamp) for v in rhs]
    g = tr.residues(b_b)
    fwd_lo = [[0] * m]
    fwd_hi = [[0] * m]
    for j in range(n):
        fwd_lo.append([fwd_lo[-1][i] + min(0, neg_r[i][j] * caps[j]) for i in range(m)])
        fwd_hi.append([fwd_hi[-1][i] + max(0, neg_r[i][j] * caps[j]) for i in range(m)])
    box = [0] * m
    layers = []
    for j in range(n):
        digits = tuple(range(caps[j] + 1))
        lo, hi = [], []
        for i in range(m):
            rem_lo = fwd_lo[n][i] - fwd_lo[j + 1][i]
            lo.append(fwd_lo[j + 1][i])
            hi.append(min(fwd_hi[j + 1][i], rho[i] - rem_lo))
            box[i] = max(box[i], abs(lo[i]), abs(hi[i]))
        layers.append(Layer(
            digits,
            tuple(wd[j] * z for z in digits),
            tr.g_column(j),
            tuple(neg_r[i][j] for i in range(m)),
            tuple(lo),
            tuple(hi),
        ))
    table = run_group_dp(tr.moduli, box, layers, ub=ub, backend=backend)
    best, keys = None, []
    for key, val in table.final_states():
        res, eta, _ = table.decode(key)
        if res != g or any(e > r for e, r in zip(eta, rho)):
            continue
        if best is None or val < best:
            best, keys = val, [key]
        elif val == best:
            keys.append(key)
    if best is None:
        return None, [], True, table.size
    ys = []
    exhaustive = True
    for key in keys:
        for y in table.paths_within(key, best, limit=TIE_LIMIT - len(ys)):
            ys.append(y)
        if len(ys) >= TIE_LIMIT:
            exhaustive = False
            break
    return best, ys, exhaustive, table.size


def solve_ilp(inst: IlpInstance, backend=None, window: int | None = None) -> IlpResult:
    """Optimal integer point (lexicographically smallest among the optima found).

    Slack digits are searched in windows ``0..Y`` with Y doubling up to the
    proximity bound ``n * Delta``. A window is accepted early once every
    point with some basis slack above Y is provably no better (by its
    reduced cost or by the tightened relaxation). ``window`` fixes Y.
    """
    lp = lp_vertex_optimum(inst)
    if lp.status == INFEASIBLE:
        return IlpResult(INFEASIBLE)
    if lp.status == UNBOUNDED:
        return IlpResult(UNBOUNDED, caveat="relaxation unbounded: integer program is unbounded or infeasible")
    n = inst.n
    order = list(lp.basis)
    rest = [i for i in range(inst.d) if i not in lp.basis]
    h_b = inst.h.take_rows(order)
    h_n = inst.h.take_rows(rest) if rest else None
    tr = group_transform(h_b, h_n)
    wd = _reduced_costs(inst, tr)
    limit = n * inst.delta_rank
    if window is not None and window < 0:
        raise ContractError("slack window must be >= 0")
    y_max = 1 if window is None else window
    states = 0
    incumbent = None
    while True:
        y_max = min(y_max, limit)
        caps = [y_max if incumbent is None or w == 0 else min(y_max, incumbent // w) for w in wd]
        best, ys, exhaustive, size = _dp_window(inst, tr, order, rest, caps, incumbent, backend)
        states += size
        if best is not None:
            incumbent = best
        if y_max >= limit or window is not None:
            break
        cert = _certify(inst, order, wd, y_max, best, lp.value, tr.delta)
        if cert is not None:
            exhaustive = exhaustive and cert
            break
        y_max *= 2
    stats = {"states": states, "window": y_max, "delta_basis": tr.delta}
    if best is None:
        return IlpResult(INFEASIBLE, lp_vertex=lp.vertex, basis=lp.basis, stats=stats)
    chosen = None
    b_b = [inst.b[i] for i in order]
    for y in ys:
        x = _recover_x(tr, b_b, y)
        if chosen is None or x < chosen[0]:
            chosen = (x, y)
    x, y = chosen
    if any(sum(a * v for a, v in zip(inst.h.row(i), x)) > inst.b[i] for i in range(inst.d)):
        raise InvariantViolation("recovered point violates the constraints")
    obj = sum(a * v for a, v in zip(inst.c, x))
    if (lp.value - obj) * tr.delta != best:
        raise InvariantViolation("objective does not match the dynamic program value")
    return IlpResult(OPTIMAL, x, obj, lp.vertex, tuple(y), lp.basis,
                     tie_break_exhaustive=exhaustive, stats=stats)


def _certify(inst, order, wd, y_max, best, lp_value, delta):
    """None if a point with some basis slack above ``y_max`` might beat the
    window's optimum; otherwise True when such points are strictly worse
    and False when they could tie."""
    strict = True
    incumbent = None if best is None else lp_value - Fraction(best, delta)
    for j, row in enumerate(order):
        if best is not None and wd[j] * (y_max + 1) > best:
            continue
        val = _branch_value(inst, row, y_max + 1)
        if val is None:
            continue
        if incumbent is None:
            return None
        # such points have an integer objective <= floor(val)
        cap = math.floor(val)
        if cap > incumbent:
            return None
        if cap == incumbent:
            strict = False
    return strict


def _recover_x(tr, b_b, y) -> tuple[int, ...]:
    v = [a - z for a, z in zip(b_b, y)]
    out = []
    for row in tr.adj.rows:
        num = sum(a * b for a, b in zip(row, v))
        if num % tr.delta:
            raise InvariantViolation("slack vector does not give an integral point")
        out.append(num // tr.delta)
    return tuple(out)


# -- oracle and checks ----------------------------------------------------

def proximity_box(inst: IlpInstance, lp: LpResult | None = None):
    """Per-variable integer bounds ``v +- n Delta ||h_B^{-1}||_inf`` (outward)."""
    lp = lp or lp_vertex_optimum(inst)
    if lp.status != OPTIMAL:
        raise ContractError("proximity box needs an optimal relaxation")
    from .exactmat import inverse

    inv = inverse(inst.h.take_rows(lp.basis))
    rad = inst.n * inst.delta_rank * max(sum(abs(v) for v in row) for row in inv)
    return tuple((math.floor(v - rad), math.ceil(v + rad)) for v in lp.vertex)


def _simplex(a_rows, b, c):
    """Exact two-phase simplex (Bland's rule): max c.x, a x <= b, x >= 0.

    Returns ``(status, value, x)``.
    """
    m, n = len(a_rows), len(c)
    arts = [i for i in range(m) if b[i] < 0]
    k = len(arts)
    width = n + m + k
    tab, rhs, basis = [], [], []
    for i in range(m):
        row = [Fraction(v) for v in a_rows[i]] + [Fraction(int(i == j)) for j in range(m)]
        val = Fraction(b[i])
        if val < 0:
            row = [-v for v in row]
            val = -val
        row += [Fraction(0)] * k
        tab.append(row)
        rhs.append(val)
        basis.append(n + i)
    for idx, i in enumerate(arts):
        tab[i][n + m + idx] = Fraction(1)
        basis[i] = n + m + idx

    def pivot(r, col):
        pv = tab[r][col]
        tab[r] = [v / pv for v in tab[r]]
        rhs[r] /= pv
        for i in range(len(tab)):
            if i != r and tab[i][col]:
                f = tab[i][col]
                tab[i] = [u - f * v for u, v in zip(tab[i], tab[r])]
                rhs[i] -= f * rhs[r]
        basis[r] = col

    def run(obj, allowed):
        while True:
            enter = None
            for j in range(allowed):
                if j in basis:
                    continue
                red = obj[j] - sum(obj[basis[i]] * tab[i][j] for i in range(len(tab)))
                if red > 0:
                    enter = j
                    break
            if enter is None:
                return True
            best = None
            for i in range(len(tab)):
                if tab[i][enter] > 0:
                    ratio = rhs[i] / tab[i][enter]
                    if best is None or (ratio, basis[i]) < best[0]:
                        best = ((ratio, basis[i]), i)
            if best is None:
                return False
            pivot(best[1], enter)

    if k:
        run([Fraction(0)] * (n + m) + [Fraction(-1)] * k, width)
        if any(basis[i] >= n + m and rhs[i] > 0 for i in range(len(tab))):
            return INFEASIBLE, None, None
        for i in range(len(tab) - 1, -1, -1):
            if basis[i] >= n + m:
                col = next((j for j in range(n + m) if tab[i][j] != 0), None)
                if col is None:
                    del tab[i], rhs[i], basis[i]
                else:
                    pivot(i, col)
        tab[:] = [row[:n + m] for row in tab]
    obj = [Fraction(v) for v in c] + [Fraction(0)] * m
    if not run(obj, n + m):
        return UNBOUNDED, None, None
    x = [Fraction(0)] * (n + m)
    for i, j in enumerate(basis):
        x[j] = rhs[i]
    return OPTIMAL, sum(cv * xv for cv, xv in zip(c, x)), tuple(x[:n])


def _box_lp(rows, rhs, c, box):
    """max c.x over rows x <= rhs and the integer box; via shifted simplex."""
    n = len(c)
    lo = [l for l, _ in box]
    a_rows = [list(r) for r in rows] + [[int(i == j) for j in range(n)] for i in range(n)]
    b = [v - sum(a * l for a, l in zip(r, lo)) for r, v in zip(rows, rhs)]
    b += [hi - l for l, hi in box]
    status, val, xs = _simplex(a_rows, b, c)
    if status != OPTIMAL:
        return status, None, None
    x = tuple(l + v for l, v in zip(lo, xs))
    return status, sum(a * v for a, v in zip(c, x)), x


def oracle_ilp(inst: IlpInstance, box) -> IlpResult:
    """Exhaustive branch and bound over the integer points of ``box`` (a list
    of ``(lo, hi)`` pairs), independent of the group dynamic program.

    Variables are fixed in index order; each node solves the exact LP of the
    remaining box and is pruned when it cannot beat the incumbent.
    """
    n, d = inst.n, inst.d
    box = [(int(lo), int(hi)) for lo, hi in box]
    if len(box) != n:
        raise DimensionError("box dimension does not match the instance")
    if any(lo > hi for lo, hi in box):
        return IlpResult(INFEASIBLE)
    rows = inst.h.rows
    best = [None, None]

    def node(prefix):
        """Explore ``prefix``; False when its relaxation is infeasible or
        cannot beat the incumbent."""
        j = len(prefix)
        rhs = [inst.b[i] - sum(rows[i][q] * prefix[q] for q in range(j)) for i in range(d)]
        fixed = sum(inst.c[q] * prefix[q] for q in range(j))
        if j == n:
            if any(v < 0 for v in rhs):
                return False
            if best[0] is None or fixed > best[0]:
                best[0], best[1] = fixed, tuple(prefix)
                return True
            return False
        status, val, x = _box_lp([r[j:] for r in rows], rhs, inst.c[j:], box[j:])
        if status != OPTIMAL:
            return False
        if best[0] is not None and math.floor(fixed + val) <= best[0]:
            return False
        # the relaxation value is concave in x_j with its peak at x[0]:
        # walk outwards and stop a direction at the first failing child
        lo, hi = box[j]
        up = min(max(math.ceil(x[0]), lo), hi + 1)
        down = max(min(up - 1, hi), lo - 1)
        while up <= hi or down >= lo:
            if up <= hi:
                up = up + 1 if node(prefix + [up]) else hi + 1
            if down >= lo:
                down = down - 1 if node(prefix + [down]) else lo - 1
        return True

    node([])
    if best[0] is None:
        return IlpResult(INFEASIBLE)
    return IlpResult(OPTIMAL, best[1], best[0])


@dataclass(frozen=True)
class ProximityReport:
    slack: tuple[int, ...]
    max_slack: int
    bound: int
    ratio: Fraction
    passed: bool


def proximity_check(inst: IlpInstance, result: IlpResult) -> ProximityReport:
    """Slack of ``result.x`` at its basis rows against ``n * Delta``."""
    if result.status != OPTIMAL or result.basis is None:
        raise ContractError("proximity check needs an optimal result with a basis")
    y = tuple(inst.b[i] - sum(a * v for a, v in zip(inst.h.row(i), result.x)) for i in result.basis)
    bound = inst.n * inst.delta_rank
    mx = max(y) if y else 0
    return ProximityReport(y, mx, bound, Fraction(mx, bound), min(y) >= 0 and mx <= bound)
