"""Exception types shared across the package.

Each class carries the CLI exit code it maps to, so scripted callers can
tell usage mistakes from bad data from numerical breakdowns.
"""


class ParameterError(ValueError):
    """Invalid argument, configuration value, or precondition violation."""

    exit_code = 2


class DataError(ValueError):
    """Unreadable, inconsistent, or out-of-range input data."""

    exit_code = 3


class NumericalError(RuntimeError):
    """A solver failed to converge or produced non-finite values."""

    exit_code = 4
