"""Exception hierarchy shared by every module."""


class SecondKindError(Exception):
    """Base class for all library errors."""


class InvalidInput(SecondKindError, ValueError):
    pass


class NoConvergence(SecondKindError, RuntimeError):
    pass


class BadBracket(SecondKindError, ValueError):
    pass


class ShapeMismatch(SecondKindError, ValueError):
    pass


class IntegrationUnstable(SecondKindError, RuntimeError):
    """Raised when a flow step breaks the a <= b <= c ordering (step too large)."""


class Undefined(SecondKindError, ValueError):
    """A scale-normalised quantity was requested where the scalar curvature is not positive."""


class EmptySample(SecondKindError, RuntimeError):
    pass
