"""Exception types shared across the package."""


class BathtubError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BathtubError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DataError(BathtubError, ValueError):
    """User-supplied table data is malformed (NaN, bad ordering, bad shape)."""


class ContractError(BathtubError, TypeError):
    """An operation was called with an object kind it does not support."""


class UndefinedStatisticsError(BathtubError):
    """Statistics of the active-trip population are undefined (no active trips)."""


class TripNotCompleted(BathtubError):
    """The queried trip does not finish within the solved horizon."""

    def __init__(self, message: str, remaining_distance: float):
        super().__init__(message)
        self.remaining_distance = remaining_distance


class ConfigError(BathtubError, ValueError):
    """A run configuration failed to parse or validate."""
