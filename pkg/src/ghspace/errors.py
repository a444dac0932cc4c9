"""Exception types shared across the package."""

from __future__ import annotations


class GHSpaceError(Exception):
    """Base class for package-specific errors."""


class ParameterError(GHSpaceError, ValueError):
    """Invalid argument, sampling spec, or configuration value."""


class ChartError(ParameterError):
    """A point cloud carries the wrong coordinate chart for an operation."""


class NumericalError(GHSpaceError, RuntimeError):
    """A numerical routine produced non-finite or inconsistent values."""


class ConvergenceError(NumericalError):
    """An iterative routine ran out of budget before reaching tolerance.

    ``best_estimate`` holds the value accumulated when the budget ran out.
    """

    def __init__(self, message: str, best_estimate: float | None = None):
        super().__init__(message)
        self.best_estimate = best_estimate


class EvaluationError(GHSpaceError, RuntimeError):
    """A node evaluator failed or returned a non-finite value."""


class ConvergenceWarning(RuntimeWarning):
    """Result may be less accurate than requested."""
