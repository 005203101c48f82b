"""Exception types shared across the package."""


class XbarError(Exception):
    """Base class for all package errors."""


class SingularMatrix(XbarError):
    """A pivot fell below the singularity threshold during elimination."""


class NotSymmetric(XbarError):
    """Matrix handed to the symmetric eigensolver is not symmetric."""


class DimensionMismatch(XbarError):
    """Operands have incompatible shapes."""


class InvalidRange(XbarError):
    """Conductance range is empty (g_min >= g_max)."""


class NegativeEntry(XbarError):
    """A matrix that must be elementwise nonnegative has a negative entry."""


class RankDeficient(XbarError):
    """Equality-constraint matrix does not have full row rank."""


class ZeroIterate(XbarError):
    """Power iteration produced a (numerically) zero vector."""


class DependentInput(XbarError):
    """Gram-Schmidt received linearly dependent vectors."""


class TooFewSamples(XbarError):
    """Dataset has fewer than two samples."""


class ParseError(XbarError):
    """A problem or data file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class WrongShape(XbarError):
    """Dataset does not have the expected shape."""


class GenerationFailure(XbarError):
    """Random problem generation failed after the retry budget."""


class MissingColumn(XbarError):
    """A CSV required for plotting lacks an expected column."""

    def __init__(self, column):
        super().__init__(f"missing column: {column}")
        self.column = column
