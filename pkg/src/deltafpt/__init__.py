"""Exact lattice and integer-programming algorithms parameterised by the
largest subdeterminant of the constraint matrix."""

from .errors import (
    ContractError,
    DeltaFptError,
    DimensionError,
    InvariantViolation,
    NotASimplexError,
    ParseError,
    RankError,
    SingularMatrixError,
    TableTooLargeError,
)
from .exactmat import IntMatrix

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "DeltaFptError",
    "DimensionError",
    "IntMatrix",
    "InvariantViolation",
    "NotASimplexError",
    "ParseError",
    "RankError",
    "SingularMatrixError",
    "TableTooLargeError",
]
