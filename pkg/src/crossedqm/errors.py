"""Exception types shared across the package."""


class CrossedQMError(Exception):
    """Base class for all package-specific errors."""


class ModelMismatchError(CrossedQMError, ValueError):
    """Raised when elements of different group models are combined."""


class BallSizeError(CrossedQMError, RuntimeError):
    """Raised when a ball enumeration would exceed the configured size cap."""


class ValidationError(CrossedQMError, ValueError):
    """Raised on invalid construction data (non-metric distance, parity
    mismatch, non-unit vectors, malformed config, ...)."""


class DegenerateSeminormError(CrossedQMError, RuntimeError):
    """Raised when a seminorm vanishes on a non-constant direction of a
    search space, so distance estimation is unbounded."""
