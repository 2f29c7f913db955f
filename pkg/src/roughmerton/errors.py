"""Exception hierarchy.

Validation problems derive from :class:`DomainError` (a ``ValueError``),
numerical breakdowns from :class:`NumericalError` (an ``ArithmeticError``).
The CLI maps the two families to distinct exit codes.
"""

from __future__ import annotations


class RoughMertonError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RoughMertonError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedConfigurationError(DomainError):
    """A valid parameter combination that the requested method cannot handle."""


class InsufficientDataError(DomainError):
    """Not enough samples for the requested statistic."""


class StagingError(RoughMertonError, RuntimeError):
    """An operation was called before its prerequisites were computed."""


class NumericalError(RoughMertonError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy result."""


class ConvergenceError(NumericalError):
    """An iterative or series evaluation missed its accuracy target."""


class DegenerateRegressionError(NumericalError):
    """Regression design or response has zero variance."""


class BlowUpError(NumericalError):
    """Explosion of a Volterra solution.

    Attributes
    ----------
    last_stable_index : int
        Last grid index at which the solution was below the cap.
    last_stable_time : float
        The corresponding time.
    """

    def __init__(self, message: str, last_stable_index: int, last_stable_time: float):
        super().__init__(message)
        self.last_stable_index = last_stable_index
        self.last_stable_time = last_stable_time
