"""Exception types raised across the package."""


class MepcsError(Exception):
    pass


class InvalidInputError(MepcsError, ValueError):
    pass


class DomainError(MepcsError, ValueError):
    """A value falls outside the source interval."""


class InsufficientDataError(MepcsError, ValueError):
    pass


class ShapeError(MepcsError, ValueError):
    pass


class TooLargeError(MepcsError, ValueError):
    """An enumeration would exceed its size guard."""


class ConfigError(MepcsError, ValueError):
    pass


class NumericError(MepcsError, ArithmeticError):
    pass
