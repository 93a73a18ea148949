"""Plain-text matrix and vector formats.

Matrix: a header line ``ROWS COLS`` followed by ROWS lines of COLS integers.
Vector: one line of integers or ``num/den`` rationals. Blank lines and lines
starting with ``#`` are ignored. Errors carry 1-based line and column.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .exactmat import IntMatrix

__all__ = ["parse_matrix", "parse_vector", "parse_int_vector", "format_matrix", "format_vector"]


def _content_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, line


def _tokens(line: str):
    """(column, token) pairs, columns 1-based."""
    col = 0
    out = []
    for tok in line.split():
        col = line.index(tok, col)
        out.append((col + 1, tok))
        col += len(tok)
    return out


def _int(tok, lineno, col):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno, col) from None


def _rational(tok, lineno, col):
    num, sep, den = tok.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ParseError(f"expected a rational num/den, got {tok!r}", lineno, col) from None
    if d == 0:
        raise ParseError("zero denominator", lineno, col)
    return Fraction(n, d)


def parse_matrix(text: str) -> IntMatrix:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty matrix file", 1, 1)
    lineno, header = lines[0]
    toks = _tokens(header)
    if len(toks) != 2:
        raise ParseError("header must be 'ROWS COLS'", lineno, toks[0][0] if toks else 1)
    nrows, ncols = (_int(t, lineno, c) for c, t in toks)
    if nrows < 1 or ncols < 1:
        raise ParseError("matrix dimensions must be positive", lineno, 1)
    body = lines[1:]
    if len(body) != nrows:
        where = body[nrows][0] if len(body) > nrows else (body[-1][0] + 1 if body else lineno + 1)
        raise ParseError(f"expected {nrows} rows, found {len(body)}", where, 1)
    rows = []
    for lineno, line in body:
        toks = _tokens(line)
        if len(toks) != ncols:
            col = toks[ncols][0] if len(toks) > ncols else len(line.rstrip()) + 1
            raise ParseError(f"expected {ncols} entries, found {len(toks)}", lineno, col)
        rows.append([_int(t, lineno, c) for c, t in toks])
    return IntMatrix(rows)


def parse_vector(text: str) -> tuple[Fraction, ...]:
    lines = list(_content_lines(text))
    if len(lines) != 1:
        raise ParseError("vector file must contain exactly one line of entries",
                         lines[1][0] if len(lines) > 1 else 1, 1)
    lineno, line = lines[0]
    return tuple(_rational(t, lineno, c) for c, t in _tokens(line))


def parse_int_vector(text: str) -> tuple[int, ...]:
    lines = list(_content_lines(text))
    if len(lines) != 1:
        raise ParseError("vector file must contain exactly one line of entries",
                         lines[1][0] if len(lines) > 1 else 1, 1)
    lineno, line = lines[0]
    return tuple(_int(t, lineno, c) for c, t in _tokens(line))


def format_matrix(a: IntMatrix) -> str:
    lines = [f"{a.nrows} {a.ncols}"]
    lines += [" ".join(str(v) for v in row) for row in a.rows]
    return "\n".join(lines) + "\n"


def format_vector(v) -> str:
    def one(x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    return " ".join(one(x) for x in v) + "\n"
