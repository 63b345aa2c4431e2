"""Exception hierarchy shared by the library and the command-line tool."""


class ScepticalError(Exception):
    """Base class for all errors raised by :mod:`scepticalp`."""


class DomainError(ScepticalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(ScepticalError, ValueError):
    """A bracketing interval does not contain a sign change."""


class ConvergenceError(ScepticalError, RuntimeError):
    """An iterative method exhausted its iteration budget."""


class EvaluationError(ScepticalError, ArithmeticError):
    """An integrand returned a non-finite value at an interior node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class InfeasibleError(ScepticalError):
    """A design or success target cannot be reached.

    ``supremum`` carries the largest attainable value when it is known.
    """

    def __init__(self, message, supremum=None):
        super().__init__(message)
        self.supremum = supremum


class ValidationError(ScepticalError, ValueError):
    """Input data failed validation."""


class ParseError(ValidationError):
    """Input file could not be parsed.  Carries the offending line/column."""

    def __init__(self, message, line=None, column=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.column = column
