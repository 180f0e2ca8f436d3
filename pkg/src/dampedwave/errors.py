"""Exception types shared across the package."""


class DampedWaveError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DampedWaveError):
    """A run configuration is malformed or violates a constraint."""


class IntegrationDivergedError(DampedWaveError):
    """A trajectory produced a non-finite state (step size too large)."""

    def __init__(self, message, step=None, replication=None):
        super().__init__(message)
        self.step = step
        self.replication = replication


class InvalidWindowError(DampedWaveError):
    """An observation window is zero where a nonzero one is required."""


class DegenerateObservationError(DampedWaveError):
    """An accumulated functional is nonpositive, so the estimator is undefined."""


class UnstableEstimateError(DampedWaveError):
    """A finite-horizon fluctuation made an estimator denominator nonpositive."""


class InsufficientSampleError(DampedWaveError):
    """A statistical routine received fewer observations than it supports."""
