"""Exception types shared across the package."""


class GodelError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GodelError, ValueError):
    """A point or parameter lies outside the domain of an operation."""


class ValidationError(GodelError, ValueError):
    """Geodesic parameters or covectors violate a normalization invariant."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotTimelikeError(DomainError):
    """A curve offered as a closed timelike witness is not timelike."""

    def __init__(self, message, causal):
        super().__init__(message)
        self.causal = causal
