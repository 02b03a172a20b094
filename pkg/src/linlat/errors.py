"""Exception types shared across the package."""

from __future__ import annotations


class LinlatError(Exception):
    """Base class for every error raised by linlat."""


class NotAPrimePower(LinlatError, ValueError):
    pass


class UnsupportedOrder(LinlatError, ValueError):
    pass


class OutOfRange(LinlatError, ValueError):
    pass


class TooLarge(LinlatError, ValueError):
    pass


class AmbientMismatch(LinlatError, ValueError):
    pass


class ParseError(LinlatError, ValueError):
    pass


class CycleError(LinlatError, ValueError):
    pass


class UnsupportedShape(LinlatError, ValueError):
    pass


class WrongLattice(LinlatError, ValueError):
    pass


class NotAMember(LinlatError, ValueError):
    pass


class PreconditionViolated(LinlatError, ValueError):
    pass


class FreenessViolated(PreconditionViolated):
    """The input family already contains a forbidden configuration."""


class FreenessViolatedAfterStep(LinlatError, AssertionError):
    """A pushdown step produced a family containing a forbidden poset."""


class HallFailure(LinlatError, AssertionError):
    """No matching saturates the top level; Hall's condition failed."""


class LemmaViolation(LinlatError, AssertionError):
    """A counting lemma's conclusion failed on a concrete instance."""


class NotFree(LinlatError, ValueError):
    pass


class BudgetExceeded(LinlatError, RuntimeError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class OutOfGuard(LinlatError, ValueError):
    """The instance is beyond what the desk-scale machinery can certify."""
