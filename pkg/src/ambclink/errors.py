"""Exception types shared across the package."""


class AmbclinkError(Exception):
    """Base class for all package errors."""


class ConfigError(AmbclinkError, ValueError):
    """Invalid scenario document or parameter value.

    `fields` names the offending keys so callers can report them.
    """

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = tuple(fields)


class ModelValidityError(AmbclinkError, ValueError):
    """Closed-form moments left the model's physical range (variance <= 0)."""


class NoSeparationError(AmbclinkError, ValueError):
    """Hypothesis means coincide; no detection threshold exists."""


class UndefinedRatioError(AmbclinkError, ValueError):
    """A power ratio has a zero denominator (e.g. |h0| = 0)."""


class EstimationError(AmbclinkError, ValueError):
    """Pilot-based estimation failed (too few pilots or degenerate variance)."""
