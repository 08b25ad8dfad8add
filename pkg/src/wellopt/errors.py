"""Exception hierarchy shared by every wellopt module."""


class WelloptError(Exception):
    """Base class for all errors raised by the package."""


class BudgetExhausted(WelloptError):
    pass


class OutOfBounds(WelloptError):
    pass


class EmptyInput(WelloptError):
    pass


class EmptyTrace(WelloptError):
    pass


class MissingGuess(WelloptError):
    pass


class DegenerateInterval(WelloptError):
    pass


class ConfigInconsistent(WelloptError):
    pass


class NegativeRate(WelloptError):
    pass


class NonConvergedPressure(WelloptError):
    pass


class InfeasibleRates(WelloptError):
    pass


class EmptyPerforation(WelloptError):
    pass


class DimensionMismatch(WelloptError):
    pass


class SchemaMismatch(WelloptError):
    pass


class ConfigError(WelloptError):
    """Invalid experiment configuration; ``location`` names the offending field or line."""

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
