"""Canonical Hermite form of a full-column-rank lattice basis, with checks.

:func:`canonicalize` brings ``a`` (d x n, rank n) to the block form

    h = [h_b]     h_b lower triangular, unit diagonal entries first,
        [h_n]     sub-diagonal entries of h_b reduced modulo the diagonal

via a row permutation and a unimodular column transform. The remaining
functions evaluate the entry and minor bounds that such a form must obey.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import DimensionError
from .exactmat import IntMatrix, det, delta as compute_delta, hnf, max_minor_abs, rank

__all__ = [
    "CanonicalSystem",
    "canonicalize",
    "EntryBoundReport",
    "SubRankBoundReport",
    "RowThresholdReport",
    "check_entry_bound",
    "check_sub_rank_bound",
    "check_row_threshold",
    "log2_at_least",
    "exceeds_threshold",
    "nontrivial_diagonal_sum_ok",
]


def log2_at_least(x: Fraction, value: int) -> bool:
    """Exact test of ``x <= log2(value)`` for rational x and integer value >= 1."""
    x = Fraction(x)
    if x <= 0:
        return True
    return 2 ** x.numerator <= value ** x.denominator


def exceeds_threshold(n: int, delta: int, power: int) -> bool:
    """Exact test of ``n > delta * (2*delta + 1)**power + log2(delta)``."""
    rest = n - delta * (2 * delta + 1) ** power
    if rest <= 0:
        return False
    return 2 ** rest > delta


@dataclass(frozen=True)
class CanonicalSystem:
    """A lattice basis in canonical block form.

    ``h == original.take_rows(row_perm) @ u``; ``u`` already includes the
    column permutation ``col_perm`` that moved the unit diagonal entries
    to the front.
    """

    h: IntMatrix
    s: int
    k: int
    delta: int
    delta_rank: int
    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    u: IntMatrix
    delta_promised: bool = False

    @property
    def n(self) -> int:
        return self.h.ncols

    @property
    def d(self) -> int:
        return self.h.nrows

    @property
    def m(self) -> int:
        return self.h.nrows - self.h.ncols

    @property
    def h_b(self) -> IntMatrix:
        return self.h.take_rows(range(self.n))

    @property
    def h_n(self) -> IntMatrix | None:
        if self.m == 0:
            return None
        return self.h.take_rows(range(self.n, self.d))

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.h[i, i] for i in range(self.n))

    def to_original_rows(self, x):
        """Map a vector in canonical row order back to the input's row order."""
        out = [0] * self.d
        for i, r in enumerate(self.row_perm):
            out[r] = x[i]
        return tuple(out)

    def from_original_rows(self, x):
        return tuple(x[r] for r in self.row_perm)

    def original_coefficients(self, t):
        """Coefficients w.r.t. the input's columns of the vector ``h @ t``."""
        return self.u @ t


def _independent_rows(a: IntMatrix) -> list[int]:
    chosen: list[int] = []
    for i in range(a.nrows):
        if rank(a.take_rows(chosen + [i])) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == a.ncols:
                break
    return chosen


def _min_det_rows(a: IntMatrix) -> list[int]:
    best = None
    for rows in combinations(range(a.nrows), a.ncols):
        v = abs(det(a.take_rows(rows)))
        if v and (best is None or v < best[0]):
            best = (v, list(rows))
            if v == 1:
                break
    return best[1] if best else []


def canonicalize(a, promised_delta: int | None = None, basis: str = "lex") -> CanonicalSystem:
    """Reduce ``a`` to canonical block form.

    With ``basis="lex"`` the basis rows are the lexicographically first n
    independent rows; ``basis="min-det"`` picks the first row set of
    smallest nonzero determinant (smaller quotient group for the solvers).
    If ``promised_delta`` is given it is trusted instead of enumerating
    every n x n minor.
    """
    a = a if isinstance(a, IntMatrix) else IntMatrix(a)
    d, n = a.shape
    if basis not in ("lex", "min-det"):
        raise ValueError(f"unknown basis rule {basis!r}")
    if d < n:
        sel = []
    elif basis == "lex":
        sel = _independent_rows(a)
    else:
        sel = _min_det_rows(a)
    if len(sel) < n:
        hnf(a)  # raises a RankError naming the dependent columns
    rest = [i for i in range(d) if i not in sel]
    res = hnf(a.take_rows(sel + rest))
    h_raw = res.h
    diag = [h_raw[i, i] for i in range(n)]
    perm = sorted(range(n), key=lambda i: diag[i] != 1)
    rows = [h_raw.row(perm[i]) for i in range(n)] + [h_raw.row(i) for i in range(n, d)]
    h = IntMatrix([[r[perm[j]] for j in range(n)] for r in rows])
    u = IntMatrix([[r[perm[j]] for j in range(n)] for r in res.u.rows])
    row_perm = tuple(sel[perm[i]] for i in range(n)) + tuple(rest)
    s = sum(1 for v in diag if v == 1)
    dlt = 1
    for v in diag:
        dlt *= v
    if promised_delta is not None:
        drank, promised = int(promised_delta), True
    else:
        drank, promised = compute_delta(a), False
    return CanonicalSystem(h, s, n - s, dlt, drank, row_perm, tuple(perm), u, promised)


def nontrivial_diagonal_sum_ok(c: CanonicalSystem) -> bool | None:
    """Check sum of nontrivial diagonal entries <= delta/2**(k-1) + 2(k-1) <= delta.

    Returns None when k == 0 (the inequality presumes a nontrivial entry).
    """
    if c.k == 0:
        return None
    total = sum(c.diagonal[c.s:])
    mid = Fraction(c.delta, 2 ** (c.k - 1)) + 2 * (c.k - 1)
    return total <= mid <= c.delta


@dataclass(frozen=True)
class EntryBoundReport:
    hn_max: int | None
    delta_rank: int
    refined_bound: Fraction | None
    within_delta: bool
    within_refined: bool
    delta_promised: bool

    @property
    def passed(self) -> bool:
        return self.within_delta and self.within_refined


def check_entry_bound(c: CanonicalSystem) -> EntryBoundReport:
    """Compare max |h_n| with Delta and with (Delta/delta)(delta/2^(k-1) + k - 1)."""
    if c.m == 0:
        return EntryBoundReport(None, c.delta_rank, None, True, True, c.delta_promised)
    hn_max = c.h_n.max_abs()
    refined = Fraction(c.delta_rank, c.delta) * (Fraction(c.delta, 2 ** c.k) * 2 + c.k - 1)
    return EntryBoundReport(
        hn_max,
        c.delta_rank,
        refined,
        hn_max <= c.delta_rank,
        hn_max <= refined,
        c.delta_promised,
    )


@dataclass(frozen=True)
class SubRankBoundReport:
    minor_max: int
    delta_rank: int
    bound: str
    passed: bool


def check_sub_rank_bound(c: CanonicalSystem) -> SubRankBoundReport:
    """Delta_{n-1}(h) against (Delta^2 / 2)(1 + log2 Delta), for d == n + 1."""
    if c.m != 1:
        raise DimensionError(f"sub-rank bound needs exactly n+1 rows, got d={c.d}, n={c.n}")
    dl = c.delta_rank
    minor = max_minor_abs(c.h, c.n - 1) if c.n > 1 else 1
    # minor <= dl^2/2 * (1 + log2 dl)  <=>  2*minor/dl^2 - 1 <= log2 dl
    ok = log2_at_least(Fraction(2 * minor, dl * dl) - 1, dl)
    return SubRankBoundReport(minor, dl, f"{dl}^2/2*(1+log2({dl}))", ok)


@dataclass(frozen=True)
class RowThresholdReport:
    applicable: bool
    n: int
    d: int
    delta_rank: int | None
    threshold_met: bool
    rows_ok: bool
    verdict: str
    singular_rows: tuple[int, ...] = ()


def check_row_threshold(a) -> RowThresholdReport:
    """If n > Delta(2 Delta + 1)^2 + log2 Delta, at most n + 1 rows are possible.

    Applies only when every n x n submatrix is nonsingular; otherwise the
    report says so instead of raising.
    """
    a = a if isinstance(a, IntMatrix) else IntMatrix(a)
    d, n = a.shape
    if d < n or rank(a) < n:
        return RowThresholdReport(False, n, d, None, False, d <= n + 1, "not-applicable")
    best = 0
    for rows in combinations(range(d), n):
        v = abs(det(a.take_rows(rows)))
        if v == 0:
            return RowThresholdReport(False, n, d, None, False, d <= n + 1, "not-applicable", rows)
        best = max(best, v)
    met = exceeds_threshold(n, best, 2)
    rows_ok = d <= n + 1
    if not met:
        verdict = "inconclusive"
    else:
        verdict = "guaranteed" if rows_ok else "violated"
    return RowThresholdReport(True, n, d, best, met, rows_ok, verdict)
