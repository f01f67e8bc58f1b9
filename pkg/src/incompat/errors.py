"""Exception hierarchy shared by all modules."""


class IncompatError(Exception):
    """Base class for package errors."""


class ValidationError(IncompatError):
    """Malformed input: bad parameters, bad graph data, bad matrices."""


class CapExceeded(IncompatError):
    """A size or work cap was hit before the computation finished."""


class SolverError(IncompatError):
    """Numerical solver failed to converge.  Carries the best certified bounds."""

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class InternalInconsistency(IncompatError):
    """An internal self-check failed; indicates a bug, not bad input."""
