"""Lattice width of simplices.

Two routes: a brute-force minimum over integer directions in a box, and the
evaluation of caller-supplied families of cone-intersection subproblems

    (p + cone(C)) ∩ (q - cone(C)) ∩ Z^k

each decided with :func:`deltafpt.geom.cone_feasible`. The second cone is
rewritten as ``{x : Ct x <= Ct q}`` with ``Ct = sign(det C) adj(C)``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import ContractError, DimensionError, NotASimplexError, ParseError, SingularMatrixError
from .exactmat import IntMatrix, adjugate, det, delta as compute_delta, max_minor_abs, rank, ratvec, solve_rational
from .geom import cone_feasible

__all__ = [
    "SimplexInstance",
    "WidthSubproblem",
    "SubproblemVerdict",
    "Family",
    "FamilyOutcome",
    "WidthDecision",
    "simplex_vertices",
    "direction_width",
    "oracle_width",
    "default_direction_box",
    "solve_subproblem",
    "load_families",
    "width_from_subproblems",
    "ANY_FEASIBLE",
    "ALL_INFEASIBLE",
]

ANY_FEASIBLE = "any-feasible"
ALL_INFEASIBLE = "all-infeasible"


@dataclass(frozen=True)
class SimplexInstance:
    h: IntMatrix
    b: tuple[int, ...]
    vertices: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def build(cls, h, b) -> "SimplexInstance":
        h = h if isinstance(h, IntMatrix) else IntMatrix(h)
        b = tuple(int(v) for v in b)
        d, n = h.shape
        if d != n + 1 or len(b) != d:
            raise DimensionError(f"a simplex needs an (n+1) x n system, got {d}x{n} with {len(b)} bounds")
        if rank(h) < n:
            raise NotASimplexError("constraint matrix is rank deficient")
        return cls(h, b, _vertices(h, b))

    @property
    def n(self) -> int:
        return self.h.ncols

    def delta(self) -> int:
        return compute_delta(self.h)

    def delta_minus_one(self) -> int:
        return max_minor_abs(self.h, self.n - 1) if self.n > 1 else 1

    def contains(self, x) -> bool:
        return all(sum(a * v for a, v in zip(row, x)) <= bv for row, bv in zip(self.h.rows, self.b))

    def lattice_empty(self) -> bool:
        """True when the simplex holds no integer point (scan of its bounding box)."""
        lo = [math.floor(min(v[i] for v in self.vertices)) for i in range(self.n)]
        hi = [math.ceil(max(v[i] for v in self.vertices)) for i in range(self.n)]
        return not any(self.contains(x) for x in product(*(range(a, b + 1) for a, b in zip(lo, hi))))


def _vertices(h: IntMatrix, b):
    d, n = h.shape
    out = []
    for drop in range(d):
        keep = [i for i in range(d) if i != drop]
        sub = h.take_rows(keep)
        if det(sub) == 0:
            raise NotASimplexError(f"rows other than {drop} are linearly dependent")
        v = solve_rational(sub, [b[i] for i in keep])
        if sum(a * x for a, x in zip(h.row(drop), v)) > b[drop]:
            raise NotASimplexError(f"vertex opposite row {drop} violates that row: polyhedron is empty or unbounded")
        out.append(v)
    if len(set(out)) != len(out):
        raise NotASimplexError("vertices coincide: simplex is degenerate")
    return tuple(out)


def simplex_vertices(inst: SimplexInstance) -> tuple[tuple[Fraction, ...], ...]:
    return inst.vertices


def direction_width(inst: SimplexInstance, c) -> Fraction:
    c = tuple(int(v) for v in c)
    if len(c) != inst.n:
        raise DimensionError("direction has the wrong dimension")
    if not any(c):
        raise ContractError("direction must be nonzero")
    vals = [sum(a * x for a, x in zip(c, v)) for v in inst.vertices]
    return Fraction(max(vals) - min(vals))


def default_direction_box(inst: SimplexInstance) -> int:
    """Heuristic box 2 * (largest coordinate spread of the vertices), at least 1."""
    spread = max(max(v[i] for v in inst.vertices) - min(v[i] for v in inst.vertices) for i in range(inst.n))
    return max(1, 2 * math.ceil(spread))


@dataclass(frozen=True)
class OracleWidth:
    width: Fraction
    direction: tuple[int, ...]
    box: int
    box_certified: bool = True  # optimal only among directions with ||c||_inf <= box


def oracle_width(inst: SimplexInstance, box: int | None = None) -> OracleWidth:
    """Minimum width over nonzero integer directions with ``||c||_inf <= box``.

    Only directions whose first nonzero entry is positive are scanned; ties
    go to the lexicographically smallest.
    """
    if box is None:
        box = default_direction_box(inst)
    if box < 1:
        raise ContractError("direction box must be >= 1")
    best = None
    for c in product(range(-box, box + 1), repeat=inst.n):
        lead = next((v for v in c if v), 0)
        if lead <= 0:
            continue
        w = direction_width(inst, c)
        if best is None or w < best[0]:
            best = (w, c)
    return OracleWidth(best[0], best[1], box)


@dataclass(frozen=True)
class WidthSubproblem:
    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]
    c: IntMatrix

    @classmethod
    def build(cls, p, q, c) -> "WidthSubproblem":
        c = c if isinstance(c, IntMatrix) else IntMatrix(c)
        p, q = ratvec(p), ratvec(q)
        if not c.is_square or len(p) != c.nrows or len(q) != c.nrows:
            raise DimensionError("subproblem vectors and cone matrix disagree in dimension")
        if det(c) == 0:
            raise SingularMatrixError("subproblem cone matrix is singular")
        return cls(p, q, c)

    @property
    def k(self) -> int:
        return self.c.nrows

    def half_spaces(self):
        """``(ct, rhs)`` with ``q - cone(c) = {x : ct x <= ct q}`` and integer
        right-hand sides ``floor(ct q)`` (exact on integer points)."""
        sign = 1 if det(self.c) > 0 else -1
        ct = adjugate(self.c).scale(sign)
        rhs = tuple(math.floor(sum(a * v for a, v in zip(row, self.q))) for row in ct.rows)
        return ct, rhs

    def in_both_cones(self, x) -> bool:
        from .exactmat import inverse

        inv = inverse(self.c)
        fwd = [sum(a * (xv - pv) for a, xv, pv in zip(row, x, self.p)) for row in inv]
        back = [sum(a * (qv - xv) for a, xv, qv in zip(row, x, self.q)) for row in inv]
        return all(v >= 0 for v in fwd) and all(v >= 0 for v in back)


@dataclass(frozen=True)
class SubproblemVerdict:
    feasible: bool
    witness: tuple[int, ...] | None


def solve_subproblem(sub: WidthSubproblem) -> SubproblemVerdict:
    ct, rhs = sub.half_spaces()
    res = cone_feasible(sub.c, sub.p, ct, rhs)
    if res.status != "feasible":
        return SubproblemVerdict(False, None)
    if not sub.in_both_cones(res.x):
        from .errors import InvariantViolation

        raise InvariantViolation(f"witness {res.x} is not in both cones")
    return SubproblemVerdict(True, res.x)


@dataclass(frozen=True)
class Family:
    threshold: Fraction
    rule: str
    subproblems: tuple[WidthSubproblem, ...]


def _rat(token, where):
    try:
        return Fraction(str(token))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: not a rational number: {token!r}") from None


def load_families(text: str) -> tuple[int, tuple[Family, ...]]:
    """Parse a family file.

    ``n`` is the simplex dimension; subproblem vectors have length ``n - 1``.
    Each family carries a ``threshold`` and an optional ``rule``
    (``"any-feasible"`` by default).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "families" not in doc or "n" not in doc:
        raise ParseError("family file needs top-level 'n' and 'families'")
    n = int(doc["n"])
    k = n - 1
    fams = []
    for fi, fam in enumerate(doc["families"]):
        rule = fam.get("rule", ANY_FEASIBLE)
        if rule not in (ANY_FEASIBLE, ALL_INFEASIBLE):
            raise ParseError(f"family {fi}: unknown rule {rule!r}")
        subs = []
        for si, sp in enumerate(fam.get("subproblems", [])):
            where = f"family {fi} subproblem {si}"
            try:
                c, p, q = sp["C"], sp["p"], sp["q"]
            except (KeyError, TypeError):
                raise ParseError(f"{where}: needs 'C', 'p' and 'q'") from None
            if len(c) == k * k and all(not isinstance(v, list) for v in c):
                c = [c[i * k:(i + 1) * k] for i in range(k)]
            if len(c) != k or any(len(row) != k for row in c):
                raise ParseError(f"{where}: 'C' must be {k}x{k}")
            if len(p) != k or len(q) != k:
                raise ParseError(f"{where}: 'p' and 'q' must have {k} entries")
            subs.append(WidthSubproblem.build(
                [_rat(v, where) for v in p], [_rat(v, where) for v in q], [[int(v) for v in row] for row in c]))
        fams.append(Family(_rat(fam["threshold"], f"family {fi}"), rule, tuple(subs)))
    return n, tuple(fams)


@dataclass(frozen=True)
class FamilyOutcome:
    threshold: Fraction
    rule: str
    verdicts: tuple[SubproblemVerdict, ...]
    holds: bool


@dataclass(frozen=True)
class WidthDecision:
    width: Fraction | None
    families: tuple[FamilyOutcome, ...]
    warnings: tuple[str, ...] = field(default=())


def width_from_subproblems(inst: SimplexInstance, families, jobs: int = 1) -> WidthDecision:
    """Decide width from supplied families.

    A family holds when its rule is satisfied by the verdicts. The decision is
    the smallest threshold among holding families (None if none holds).
    Warnings report supplied families that break the expected size bound on
    lattice-empty simplices or the subdeterminant bound on cone matrices.
    """
    families = tuple(families)
    if not families:
        raise ContractError("no subproblem families supplied")
    warnings = []
    dl = inst.delta()
    dl1 = inst.delta_minus_one()
    empty = inst.lattice_empty()
    outcomes = []
    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for fi, fam in enumerate(families):
            for si, sub in enumerate(fam.subproblems):
                if sub.k != inst.n - 1:
                    raise DimensionError(f"family {fi} subproblem {si} has dimension {sub.k}, expected {inst.n - 1}")
                if abs(det(sub.c)) > dl1:
                    warnings.append(f"family {fi} subproblem {si}: |det C| = {abs(det(sub.c))} exceeds {dl1}")
            if empty and len(fam.subproblems) > dl:
                warnings.append(f"family {fi}: {len(fam.subproblems)} subproblems on a lattice-empty simplex exceeds {dl}")
            if pool is not None:
                verdicts = tuple(pool.map(solve_subproblem, fam.subproblems))
            else:
                verdicts = tuple(solve_subproblem(s) for s in fam.subproblems)
            if fam.rule == ANY_FEASIBLE:
                holds = any(v.feasible for v in verdicts)
            else:
                holds = not any(v.feasible for v in verdicts)
            outcomes.append(FamilyOutcome(fam.threshold, fam.rule, verdicts, holds))
    finally:
        if pool is not None:
            pool.shutdown()
    held = [o.threshold for o in outcomes if o.holds]
    return WidthDecision(min(held) if held else None, tuple(outcomes), tuple(warnings))
