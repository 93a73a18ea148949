"""Exact integer and rational dense linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`, so no
result is ever rounded. Matrices are immutable :class:`IntMatrix` values;
rational vectors are plain tuples of ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionError, RankError, SingularMatrixError

__all__ = [
    "IntMatrix",
    "HnfResult",
    "SnfResult",
    "ratvec",
    "det",
    "rank",
    "adjugate",
    "max_minor_abs",
    "delta",
    "hnf",
    "snf",
    "solve_rational",
    "nullspace_vector",
    "inverse",
    "ext_gcd",
]


class IntMatrix:
    """Dense matrix of arbitrary-precision integers, immutable."""

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[Iterable[int]]):
        data = tuple(tuple(int(v) for v in row) for row in rows)
        if not data or not data[0]:
            raise DimensionError("empty matrices are not supported")
        ncols = len(data[0])
        for i, row in enumerate(data):
            if len(row) != ncols:
                raise DimensionError(f"row {i} has {len(row)} entries, expected {ncols}")
        self._rows = data
        self._ncols = ncols

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, entries: Sequence[int]) -> "IntMatrix":
        return cls([[v] for v in entries])

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._ncols

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    @property
    def is_square(self) -> bool:
        return len(self._rows) == self._ncols

    def row(self, i: int) -> tuple[int, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(zip(*self._rows))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> "IntMatrix":
        if cols is None:
            cols = range(self._ncols)
        return IntMatrix([[self._rows[i][j] for j in cols] for i in rows])

    def take_rows(self, rows: Sequence[int]) -> "IntMatrix":
        return IntMatrix([self._rows[i] for i in rows])

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if other.ncols != self._ncols:
            raise DimensionError("column counts differ")
        return IntMatrix(self._rows + other._rows)

    def max_abs(self) -> int:
        return max(abs(v) for r in self._rows for v in r)

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self._rows[i][j]
        return self._rows[idx]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self._ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = list(zip(*other.rows))
            return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows])
        vec = tuple(other)
        if len(vec) != self._ncols:
            raise DimensionError(f"cannot multiply {self.shape} by vector of length {len(vec)}")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self._rows)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * v for v in r] for r in self._rows])

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        if isinstance(other, IntMatrix):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"


def ratvec(values: Iterable) -> tuple[Fraction, ...]:
    """Coerce ints, Fractions or ``"num/den"`` strings to a rational vector."""
    return tuple(Fraction(v) for v in values)


def _as_matrix(a) -> IntMatrix:
    return a if isinstance(a, IntMatrix) else IntMatrix(a)


def _require_square(a: IntMatrix, what: str) -> None:
    if not a.is_square:
        raise DimensionError(f"{what} needs a square matrix, got {a.nrows}x{a.ncols}")


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _bareiss(rows: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination in place; returns (rank, sign-adjusted last pivot).

    For a square nonsingular input the second value is the determinant.
    """
    m = len(rows)
    n = len(rows[0])
    sign = 1
    prev = 1
    r = 0
    last = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            sign = -sign
        piv = rows[r][c]
        for i in range(r + 1, m):
            ri = rows[i]
            f = ri[c]
            for j in range(c + 1, n):
                ri[j] = (piv * ri[j] - f * rows[r][j]) // prev
            ri[c] = 0
        prev = piv
        last = piv
        r += 1
    return r, sign * last


def det(a) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = _as_matrix(a)
    _require_square(a, "det")
    work = a.tolist()
    r, d = _bareiss(work)
    return d if r == a.nrows else 0


def rank(a) -> int:
    a = _as_matrix(a)
    return _bareiss(a.tolist())[0]


def adjugate(a) -> IntMatrix:
    """Classical adjoint: ``a @ adjugate(a) == det(a) * I``, singular inputs included."""
    a = _as_matrix(a)
    _require_square(a, "adjugate")
    n = a.nrows
    if n == 1:
        return IntMatrix([[1]])
    d = det(a)
    if d != 0:
        inv = inverse(a)
        return IntMatrix([[int(v * d) for v in row] for row in inv])
    out = [[0] * n for _ in range(n)]
    idx = range(n)
    for i in idx:
        for j in idx:
            minor = a.submatrix([r for r in idx if r != j], [c for c in idx if c != i])
            out[i][j] = (-1) ** (i + j) * det(minor)
    return IntMatrix(out)


def max_minor_abs(a, k: int) -> int:
    """Largest absolute k x k minor, by exhaustive enumeration."""
    a = _as_matrix(a)
    if not 1 <= k <= min(a.shape):
        raise DimensionError(f"minor order {k} out of range for {a.nrows}x{a.ncols}")
    best = 0
    for rs in combinations(range(a.nrows), k):
        sub_rows = [a.row(i) for i in rs]
        for cs in combinations(range(a.ncols), k):
            v = abs(det(IntMatrix([[r[j] for j in cs] for r in sub_rows])))
            if v > best:
                best = v
    return best


def delta(a) -> int:
    """Delta(a): the largest absolute minor of order rank(a)."""
    a = _as_matrix(a)
    r = rank(a)
    if r == 0:
        return 0
    return max_minor_abs(a, r)


def solve_rational(a, b) -> tuple[Fraction, ...]:
    """Solve ``a x = b`` exactly over the rationals (a square, nonsingular)."""
    a = _as_matrix(a)
    _require_square(a, "solve_rational")
    n = a.nrows
    b = ratvec(b)
    if len(b) != n:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {n}")
    aug = [[Fraction(v) for v in a.row(i)] + [b[i]] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        rowc = [v / piv for v in aug[c]]
        aug[c] = rowc
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], rowc)]
    return tuple(aug[i][n] for i in range(n))


def inverse(a) -> tuple[tuple[Fraction, ...], ...]:
    """Rational inverse as a tuple of rows."""
    a = _as_matrix(a)
    _require_square(a, "inverse")
    n = a.nrows
    cols = [solve_rational(a, [int(i == j) for i in range(n)]) for j in range(n)]
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def nullspace_vector(a) -> tuple[int, ...] | None:
    """A primitive nonzero integer vector in the right kernel of ``a``, or None."""
    a = _as_matrix(a)
    m, n = a.shape
    rows = [[Fraction(v) for v in r] for r in a.rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [Fraction(0)] * n
    vec[fc] = Fraction(1)
    for i, pc in enumerate(pivots):
        vec[pc] = -rows[i][fc]
    den = 1
    for v in vec:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(v // g for v in ints)


@dataclass(frozen=True)
class HnfResult:
    """Column-style Hermite normal form ``original @ u == h``.

    ``pivot_rows[j]`` is the row holding the positive pivot of column j; when
    the leading rows are independent this is simply ``0..n-1``.
    """

    h: IntMatrix
    u: IntMatrix
    pivot_rows: tuple[int, ...]


@dataclass(frozen=True)
class SnfResult:
    """Smith form with witnesses: ``p @ a @ q == s`` and ``a == p_inv @ s @ q_inv``."""

    s: IntMatrix
    p_inv: IntMatrix
    q_inv: IntMatrix
    p: IntMatrix
    q: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.s[i, i] for i in range(self.s.nrows))


def _col_combine(mats, j, k, x, y, z, w):
    """Replace columns (j, k) by (x*c_j + y*c_k, z*c_j + w*c_k) in each matrix."""
    for mat in mats:
        for row in mat:
            cj, ck = row[j], row[k]
            row[j] = x * cj + y * ck
            row[k] = z * cj + w * ck


def _raise_rank_error(a: IntMatrix) -> None:
    kernel = nullspace_vector(a)
    support = tuple(i for i, v in enumerate(kernel or ()) if v)
    raise RankError(
        f"matrix does not have full column rank; columns {list(support)} are dependent",
        dependent_columns=support,
    )


def hnf(a) -> HnfResult:
    """Lower (column-style) Hermite normal form of a full-column-rank matrix.

    Rows are processed top to bottom; in each pivot row the entries right of
    the pivot are cleared with unimodular gcd steps and the entries left of
    it are reduced into ``[0, pivot)``.
    """
    a = _as_matrix(a)
    d, n = a.shape
    if d < n:
        _raise_rank_error(a)
    h = a.tolist()
    u = IntMatrix.identity(n).tolist()
    pc = 0
    pivot_rows = []
    for i in range(d):
        if pc == n:
            break
        row = h[i]
        for j in range(pc + 1, n):
            if row[j] == 0:
                continue
            p, q = row[pc], row[j]
            g, x, y = ext_gcd(p, q)
            # det [[x, -q/g], [y, p/g]] = 1
            _col_combine((h, u), pc, j, x, y, -q // g, p // g)
        if row[pc] == 0:
            continue
        if row[pc] < 0:
            for mat in (h, u):
                for r in mat:
                    r[pc] = -r[pc]
        piv = row[pc]
        for j in range(pc):
            f = row[j] // piv
            if f:
                for mat in (h, u):
                    for r in mat:
                        r[j] -= f * r[pc]
        pivot_rows.append(i)
        pc += 1
    if pc < n:
        _raise_rank_error(a)
    return HnfResult(IntMatrix(h), IntMatrix(u), tuple(pivot_rows))


def snf(a) -> SnfResult:
    """Smith normal form of a square nonsingular integer matrix."""
    a = _as_matrix(a)
    _require_square(a, "snf")
    if det(a) == 0:
        raise SingularMatrixError("snf requires a nonsingular matrix")
    n = a.nrows
    s = a.tolist()
    p = IntMatrix.identity(n).tolist()
    p_inv = IntMatrix.identity(n).tolist()
    q = IntMatrix.identity(n).tolist()
    q_inv = IntMatrix.identity(n).tolist()

    def row_addmul(i, t, f):
        # row_i += f * row_t
        for mat in (s, p):
            mat[i] = [x + f * y for x, y in zip(mat[i], mat[t])]
        for r in p_inv:
            r[t] -= f * r[i]

    def col_addmul(j, t, f):
        # col_j += f * col_t
        for mat in (s, q):
            for r in mat:
                r[j] += f * r[t]
        q_inv[t] = [x - f * y for x, y in zip(q_inv[t], q_inv[j])]

    def swap_rows(i, t):
        for mat in (s, p):
            mat[i], mat[t] = mat[t], mat[i]
        for r in p_inv:
            r[i], r[t] = r[t], r[i]

    def swap_cols(j, t):
        for mat in (s, q):
            for r in mat:
                r[j], r[t] = r[t], r[j]
        q_inv[j], q_inv[t] = q_inv[t], q_inv[j]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    v = abs(s[i][j])
                    if v and (best is None or v < best[0]):
                        best = (v, i, j)
            _, bi, bj = best
            if bi != t:
                swap_rows(bi, t)
            if bj != t:
                swap_cols(bj, t)
            piv = s[t][t]
            clean = True
            for i in range(t + 1, n):
                f = s[i][t] // piv
                if f:
                    row_addmul(i, t, -f)
                if s[i][t]:
                    clean = False
            for j in range(t + 1, n):
                f = s[t][j] // piv
                if f:
                    col_addmul(j, t, -f)
                if s[t][j]:
                    clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if s[i][j] % piv),
                None,
            )
            if bad is None:
                break
            row_addmul(t, bad, 1)
        if s[t][t] < 0:
            s[t] = [-v for v in s[t]]
            p[t] = [-v for v in p[t]]
            for r in p_inv:
                r[t] = -r[t]
    return SnfResult(IntMatrix(s), IntMatrix(p_inv), IntMatrix(q_inv), IntMatrix(p), IntMatrix(q))
