"""Integer points of shifted half-open parallelepipeds and cone programs.

``enumerate_par`` lists ``(p + A [0,1)^n) ∩ Z^n``. With the column Hermite
form ``A^T U = H^T`` (H upper triangular) we have ``A = Q H`` for the
unimodular ``Q = U^{-T}``; in the coordinates ``y = Q^{-1} x`` the cell is
``r + H [0,1)^n`` with ``r = Q^{-1} p`` and the coordinates can be fixed one
at a time from the last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ContractError, DimensionError, SingularMatrixError
from .exactmat import IntMatrix, adjugate, det, hnf, inverse, ratvec

__all__ = [
    "ParInstance",
    "ParEnumeration",
    "enumerate_par",
    "ConeProgram",
    "ConeResult",
    "cone_optimize",
    "cone_feasible",
    "feasibility_objective",
]


def _mat(a) -> IntMatrix:
    return a if isinstance(a, IntMatrix) else IntMatrix(a)


@dataclass(frozen=True)
class ParInstance:
    a: IntMatrix
    p: tuple[Fraction, ...]

    @classmethod
    def build(cls, a, p) -> "ParInstance":
        a = _mat(a)
        p = ratvec(p)
        if not a.is_square:
            raise DimensionError("cell generator matrix must be square")
        if len(p) != a.nrows:
            raise DimensionError(f"shift has dimension {len(p)}, expected {a.nrows}")
        if det(a) == 0:
            raise SingularMatrixError("cell generator matrix is singular")
        return cls(a, p)

    @property
    def n(self) -> int:
        return self.a.nrows


@dataclass(frozen=True)
class ParEnumeration:
    points: tuple[tuple[int, ...], ...]
    diagonal: tuple[int, ...]
    lower: int
    upper: int

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def bounds_hold(self) -> bool:
        return self.lower <= self.count <= self.upper


def _matvec_frac(rows, vec):
    return tuple(sum(a * b for a, b in zip(row, vec)) for row in rows)


def enumerate_par(inst: ParInstance) -> ParEnumeration:
    """All integer points of ``p + parl(a)`` in lexicographic order.

    Each point is certified by ``a^{-1}(x - p) in [0,1)^n``.
    """
    a, n = inst.a, inst.n
    res = hnf(a.T)
    h = res.h.T  # upper triangular, positive diagonal
    # a = q h with q = u^{-T}; we need q^{-1} = u^T and q
    q_inv = res.u.T
    q = IntMatrix([[int(v) for v in row] for row in inverse(q_inv)])
    r = _matvec_frac(q_inv.rows, inst.p)
    diag = tuple(h[i, i] for i in range(n))
    found = []
    y = [0] * n
    t = [Fraction(0)] * n

    def fill(s):
        if s < 0:
            found.append(tuple(q @ tuple(y)))
            return
        tau = r[s] + sum(h[s, s + i] * t[s + i] for i in range(1, n - s))
        hs = diag[s]
        base = math.ceil(tau)
        # y_s = base + j must satisfy base + j < tau + hs (half-open cell)
        j = 0
        while base + j - tau < hs:
            y[s] = base + j
            t[s] = Fraction(y[s] - tau, hs)
            fill(s - 1)
            j += 1

    fill(n - 1)
    found.sort()
    a_inv = inverse(a)
    for x in found:
        coords = _matvec_frac(a_inv, [xv - pv for xv, pv in zip(x, inst.p)])
        if not all(0 <= v < 1 for v in coords):
            from .errors import InvariantViolation

            raise InvariantViolation(f"enumerated point {x} lies outside the cell")
    lower = math.prod(math.floor(v) for v in diag)
    upper = math.prod(math.ceil(v) for v in diag)
    return ParEnumeration(tuple(found), diag, lower, upper)


@dataclass(frozen=True)
class ConeProgram:
    """``max cvec.x`` over ``(p + cone(c)) ∩ {a x <= b} ∩ Z^n``.

    Construction enforces ``cvec^T c <= 0`` and ``a c >= 0``, which make the
    cell ``p + parl(c)`` contain an optimum whenever one exists.
    """

    c: IntMatrix
    p: tuple[Fraction, ...]
    a: IntMatrix | None
    b: tuple[int, ...]
    cvec: tuple[int, ...]

    @classmethod
    def build(cls, c, p, a, b, cvec) -> "ConeProgram":
        c = _mat(c)
        p = ratvec(p)
        n = c.nrows
        if not c.is_square or len(p) != n or len(cvec) != n:
            raise DimensionError("cone generators, apex and objective must agree in dimension")
        if det(c) == 0:
            raise SingularMatrixError("cone generator matrix is singular")
        b = tuple(int(v) for v in b)
        if a is not None and not isinstance(a, IntMatrix) and len(a) == 0:
            a = None
        if a is not None:
            a = _mat(a)
            if a.ncols != n or a.nrows != len(b):
                raise DimensionError("constraint matrix and right-hand side disagree")
            if any(v < 0 for row in (a @ c).rows for v in row):
                raise ContractError("constraint rows must satisfy a @ c >= 0")
        elif b:
            raise DimensionError("right-hand side given without constraint rows")
        cvec = tuple(int(v) for v in cvec)
        if any(sum(cvec[i] * c[i, j] for i in range(n)) > 0 for j in range(n)):
            raise ContractError("objective must satisfy cvec^T c <= 0")
        return cls(c, p, a, b, cvec)

    @property
    def n(self) -> int:
        return self.c.nrows

    def in_cone(self, x) -> bool:
        coords = _matvec_frac(inverse(self.c), [xv - pv for xv, pv in zip(x, self.p)])
        return all(v >= 0 for v in coords)

    def satisfies(self, x) -> bool:
        if self.a is None:
            return True
        return all(sum(av * xv for av, xv in zip(row, x)) <= bv for row, bv in zip(self.a.rows, self.b))

    def objective(self, x) -> int:
        return sum(a * b for a, b in zip(self.cvec, x))


@dataclass(frozen=True)
class ConeResult:
    status: str
    x: tuple[int, ...] | None
    objective: int | None
    cell_points: int


def cone_optimize(prog: ConeProgram) -> ConeResult:
    """Best point of the cell ``p + parl(c)`` inside ``a x <= b``
    (lexicographically smallest among ties)."""
    cell = enumerate_par(ParInstance(prog.c, prog.p))
    best = None
    for x in cell.points:
        if not prog.satisfies(x):
            continue
        val = prog.objective(x)
        if best is None or val > best[0]:
            best = (val, x)
    if best is None:
        return ConeResult("infeasible", None, None, cell.count)
    return ConeResult("optimal", best[1], best[0], cell.count)


def feasibility_objective(c) -> tuple[int, ...]:
    """An objective with ``cvec^T c = -|det c| (1, ..., 1) <= 0``."""
    c = _mat(c)
    dlt = det(c)
    if dlt == 0:
        raise SingularMatrixError("cone generator matrix is singular")
    sign = 1 if dlt > 0 else -1
    adj = adjugate(c)
    return tuple(-sign * sum(adj[i, j] for i in range(c.nrows)) for j in range(c.ncols))


def cone_feasible(c, p, a, b) -> ConeResult:
    """Witness integer point of ``(p + cone(c)) ∩ {a x <= b}`` or infeasible."""
    prog = ConeProgram.build(c, p, a, b, feasibility_objective(c))
    res = cone_optimize(prog)
    status = "feasible" if res.status == "optimal" else "infeasible"
    return ConeResult(status, res.x, None, res.cell_points)
