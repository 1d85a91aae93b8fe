"""Exception hierarchy shared by every module."""


class MrlcdError(Exception):
    """Base class for all library errors."""


class ParameterError(MrlcdError, ValueError):
    """An argument is outside its admissible range."""


class PreconditionError(MrlcdError, ValueError):
    """Inputs are valid individually but violate an operation's hypothesis."""


class StructuralError(MrlcdError, ValueError):
    """A vector lacks the structure an operation needs (e.g. too few spread coordinates)."""


class NumericError(MrlcdError, ArithmeticError):
    """Non-finite input or a numerical routine that failed to converge."""


class CapacityError(MrlcdError, RuntimeError):
    """The requested exact computation exceeds the configured size cap."""


class CertificationError(MrlcdError, RuntimeError):
    """Randomized rounding ran out of attempts.

    ``best`` holds the attempt that came closest to certifying.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
