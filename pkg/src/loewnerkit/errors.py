"""Exception hierarchy.

``NumericalError`` subclasses map to CLI exit code 1, input problems to 2.
"""


class LoewnerKitError(Exception):
    """Base class for all package errors."""


class DataFormatError(LoewnerKitError, ValueError):
    """Malformed data file. ``row`` is the 0-based data row when known."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class ValidationError(LoewnerKitError, ValueError):
    """Inputs violate a documented precondition."""


class ConjugateInconsistencyError(ValidationError):
    """Data claimed to be conjugate-symmetric is not."""


class NumericalError(LoewnerKitError, ArithmeticError):
    """A numerical step failed (singular system, ill-conditioning, ...)."""


class NodeCollisionError(NumericalError):
    """Two node sets share a point, so a divided difference is undefined."""

    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class EvaluationError(NumericalError):
    """A model could not be evaluated at ``s`` (pole or near-singular solve)."""

    def __init__(self, message, s=None):
        self.s = s
        super().__init__(message)


class SingularPencilError(NumericalError):
    """The pencil ``(E, A)`` is singular; use SVD truncation instead."""


class IllConditionedError(NumericalError):
    """Condition estimate above the refusal threshold."""

    def __init__(self, message, cond=None):
        self.cond = cond
        super().__init__(message)
