"""Exception types raised across the package."""


class ThzTrackError(Exception):
    """Base class for all package errors."""


class DegenerateGeometryError(ThzTrackError, ValueError):
    """Target and base station coincide, so no direction is defined."""


class InvalidRangeError(ThzTrackError, ValueError):
    """A distance that must be positive was not."""


class InvalidGeometryError(ThzTrackError, ValueError):
    """An angle or beam index lies outside the array's visible region."""


class NoSignalError(ThzTrackError, ValueError):
    """An observation carries no energy at all."""


class InvalidTimestampsError(ThzTrackError, ValueError):
    """Ranging timestamps give a negative round-trip residual."""


class TotalTrackingLossError(ThzTrackError):
    """No base station produced a valid position estimate."""


class ConfigError(ThzTrackError, ValueError):
    """Scenario configuration is invalid."""
