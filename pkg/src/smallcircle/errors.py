"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SmallCircleError(ValueError):
    """Base class for every error raised by this package."""


class DimensionError(SmallCircleError):
    """Operand has the wrong shape (not square, wrong block sizes, k >= N, ...)."""


# Name used by the eigensolver contract.
DimensionMismatch = DimensionError


class NotHermitian(SmallCircleError):
    pass


class NotAntiHermitian(SmallCircleError):
    pass


class NotUnitary(SmallCircleError):
    def __init__(self, message: str, deviation: float | None = None):
        super().__init__(message)
        self.deviation = deviation


class InvalidFrame(SmallCircleError):
    pass


class OpenLoop(SmallCircleError):
    """The small circle generated by X does not return to its starting point."""

    def __init__(self, penalty: float, tol: float):
        super().__init__(f"loop does not close: penalty {penalty:.3e} > {tol:.1e}")
        self.penalty = penalty
        self.tol = tol


class InsufficientSteps(SmallCircleError):
    pass


class InvalidDirection(SmallCircleError):
    pass


class ZeroWinding(SmallCircleError):
    pass


class EmptyInput(SmallCircleError):
    pass


class VerificationError(SmallCircleError):
    pass


class FixtureMismatch(SmallCircleError):
    pass


class DegenerateStart(SmallCircleError):
    pass


class NoConvergence(SmallCircleError):
    """Raised by the penalty search; ``result`` holds the best iterate found."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
