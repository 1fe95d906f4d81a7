"""Module for the exceptions raised by the library."""


class MSRLError(Exception):
    """Base class for every error raised by the library."""


class ContractError(MSRLError, ValueError):
    """A precondition of an operation is violated."""


class ShapeError(ContractError):
    """Operand dimensions do not agree."""


class DomainError(MSRLError, ArithmeticError):
    """A value falls outside the domain of a function (e.g. log of 0)."""


class DivergenceError(MSRLError, RuntimeError):
    """Training produced a non-finite loss or gradient."""


class DataFormatError(MSRLError, ValueError):
    """An input file cannot be parsed."""

    def __init__(self, message: str, row: int = None, column: str = None):
        location = ""
        if row is not None or column is not None:
            location = f" (row {row}, column {column})"
        super().__init__(message + location)
        self.row = row
        self.column = column
