"""Exception types shared across the package."""


class TnisoError(Exception):
    """Base class for all package errors."""


class ContractViolation(TnisoError, ValueError):
    """An input violates a documented precondition or invariant."""


class NumericError(TnisoError, RuntimeError):
    """A numerical kernel failed (non-finite input, decomposition failure)."""


class ConvergenceError(TnisoError, RuntimeError):
    """An iterative procedure did not converge within its budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotCorrectableError(TnisoError, RuntimeError):
    """Recovery construction was requested for a code that is not preserved."""
