"""Exception types raised by the package."""


class PlumbingError(Exception):
    """Base class for all errors raised by plumbdelta."""


class ValidationError(PlumbingError, ValueError):
    """Input graph or data violates a structural invariant."""


class ParseError(PlumbingError, ValueError):
    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class SingularMatrix(PlumbingError, ArithmeticError):
    pass


class DimensionMismatch(PlumbingError, ValueError):
    pass


class NotPositiveDefinite(PlumbingError, ValueError):
    pass


class NotNegativeDefinite(PlumbingError, ValueError):
    pass


class NotWeaklyNegativeDefinite(PlumbingError, ValueError):
    pass


class ImpossibleForWeaklyNegDef(NotWeaklyNegativeDefinite):
    """A 0-decorated leaf hangs off a node; never happens for weakly negative definite input."""


class SingularBlock(PlumbingError, ArithmeticError):
    pass


class InvalidPair(PlumbingError, ValueError):
    pass


class NotCoprime(PlumbingError, ValueError):
    pass


class ConstraintViolation(PlumbingError, ValueError):
    pass


class VertexNotInDiagram(PlumbingError, KeyError):
    pass


class MoveNotApplicable(PlumbingError, ValueError):
    pass


class NodeCreatingMoveRejected(MoveNotApplicable):
    pass


class NonTermination(PlumbingError, RuntimeError):
    pass


class CapExceeded(PlumbingError, RuntimeError):
    pass


class LevelTooSmall(UserWarning):
    """Requested truncation level lies below every exponent the series can have."""
