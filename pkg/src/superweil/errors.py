"""Exception types shared across the package."""


class SuperweilError(Exception):
    """Base class for every error raised by this package."""


class AxiomViolation(SuperweilError):
    """A structure table fails one of the defining algebra axioms."""


class AlgebraMismatch(SuperweilError):
    """Operands belong to different algebras, or a morphism chain does not line up."""


class NotInvertible(SuperweilError):
    """The element has zero body, hence no inverse."""


class ParityError(SuperweilError):
    """A value violates the even/odd grading required of it."""


class NotWellDefined(SuperweilError):
    """Generator images fail to kill the defining relations of the source algebra."""


class UnsupportedPresentation(SuperweilError):
    """The operation needs a truncated-polynomial presentation of the algebra."""


class DomainMismatch(SuperweilError):
    """Objects live on different superdomains, or a base point leaves its box."""


class EvaluationDomainError(SuperweilError):
    """A coefficient function was evaluated outside its domain of definition."""


class TruncationError(SuperweilError):
    """The series truncation order is too small for the requested algebra."""


class NotSmooth(SuperweilError):
    """A formal-series family fails the derivative recursion check."""


class ParseError(SuperweilError):
    """Malformed input text; carries a 1-based line/column position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
