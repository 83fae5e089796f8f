"""Exception types shared across the package."""


class HurwitzError(Exception):
    """Base class for all package errors."""


class InvalidInputError(HurwitzError):
    """Malformed or mathematically inconsistent input (bad table, bad selector, ...)."""


class InfeasibleSizeError(HurwitzError):
    """A computation would exceed a configured size cap."""


class FitError(HurwitzError):
    """Quasi-polynomial fitting failed (short window or non-polynomial tail)."""

    def __init__(self, message, first_bad_weight=None):
        super().__init__(message)
        self.first_bad_weight = first_bad_weight


class InconclusiveError(HurwitzError):
    """A scan or stability window ended without the expected behaviour being observed."""
