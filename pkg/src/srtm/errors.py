"""Exception types raised by the estimators and the CLI."""


class SrtmError(Exception):
    """Base class for all package errors."""


class ModelError(SrtmError, ValueError):
    """Inconsistent dimensions or invalid model / configuration values."""


class NumericalError(SrtmError, ArithmeticError):
    """A linear solve failed (singular or indefinite matrix).

    ``step`` carries the 1-based interval index when the failure can be
    attributed to one.
    """

    def __init__(self, message, step=None):
        if step is not None:
            message = f"{message} (interval k={step})"
        super().__init__(message)
        self.step = step


class NumericalWarning(RuntimeWarning):
    pass
