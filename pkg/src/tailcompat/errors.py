"""Exception hierarchy.

Every error raised for bad user input derives from :class:`DomainError`;
the CLI maps those to exit code 2.
"""


class DomainError(ValueError):
    """Input violates a mathematical precondition."""


class OutOfRange(DomainError):
    pass


class NotSymmetric(DomainError):
    pass


class BadDiagonal(DomainError):
    pass


class DimMismatch(DomainError):
    pass


class DimTooLarge(DomainError):
    pass


class BadWeight(DomainError):
    pass


class BadParam(DomainError):
    pass


class BadPoint(DomainError):
    pass


class BadModel(DomainError):
    pass


class NotDiagonallyDominant(DomainError):
    pass


class UnsupportedFactor(DomainError):
    """Copula factor has no closed-form evaluator."""


class TooFewSamples(DomainError):
    pass


class BadThreshold(DomainError):
    pass


class FileFormatError(OSError):
    """Malformed input file; the CLI maps it to exit code 3."""
