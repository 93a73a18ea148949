"""Exception hierarchy shared by every module.

Each class carries a machine-readable ``kind`` that the CLI maps to an
error payload and exit code.
"""


class DeltaFptError(Exception):
    kind = "error"


class DimensionError(DeltaFptError, ValueError):
    kind = "dimension-error"


class RankError(DeltaFptError, ValueError):
    kind = "rank-error"

    def __init__(self, message, dependent_columns=()):
        super().__init__(message)
        self.dependent_columns = tuple(dependent_columns)


class SingularMatrixError(DeltaFptError, ValueError):
    kind = "singular-matrix"


class ContractError(DeltaFptError, ValueError):
    kind = "contract-error"


class NotASimplexError(DeltaFptError, ValueError):
    kind = "not-a-simplex"


class ParseError(DeltaFptError, ValueError):
    kind = "parse-error"

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class TableTooLargeError(DeltaFptError, MemoryError):
    kind = "table-too-large"


class InvariantViolation(DeltaFptError, AssertionError):
    """Raised when a post-condition that the mathematics guarantees fails."""

    kind = "invariant-violation"
