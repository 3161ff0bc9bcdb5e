"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain an operation accepts."""


class DimmingRangeError(ParameterError):
    """A dimming target needs more compensation symbols than a frame may hold."""


class UndefinedStatisticError(ArithmeticError):
    """A statistic was requested from a ledger that holds no samples."""


class ConfigError(ParameterError):
    """An experiment config field is missing or invalid."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
