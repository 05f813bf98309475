"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError -> 3, NumericError -> 4.
"""


class ReclusterError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ReclusterError):
    """A parameter value or option combination is invalid."""


class DataError(ReclusterError):
    """The input data cannot be processed as requested."""


class NumericError(ReclusterError):
    """A numeric computation produced an unusable result."""
