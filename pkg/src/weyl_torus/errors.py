"""Exception hierarchy shared by all modules."""


class WeylTorusError(Exception):
    """Base class for every error raised by this package."""


class RankError(WeylTorusError, ValueError):
    """Family/rank combination outside the supported range."""


class ValidationError(WeylTorusError, ValueError):
    """Input violates a documented precondition."""


class ResourceLimitError(WeylTorusError):
    """An orbit, group or iteration cap was exceeded."""


class NumericError(WeylTorusError):
    """A floating point routine failed to converge.

    ``details`` carries diagnostic data (residuals, iteration counts).
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = dict(details or {})


class InternalError(WeylTorusError):
    """An identity that must hold by construction failed."""
