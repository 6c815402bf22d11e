"""Exception types raised across the package.

All of them derive from :class:`ValueError` so callers that only care about
bad input can catch that.
"""


class OtwError(ValueError):
    """Base class for data errors raised by this package."""


class InvalidSeriesError(OtwError):
    """A series is empty, not one-dimensional, or holds non-finite values."""


class LengthMismatchError(OtwError):
    """Two series that must share a length do not."""


class WindowError(OtwError):
    """A window size is outside its admissible range."""


class UnbalancedError(OtwError):
    """Supplies and demands (or two masses) do not sum to the same total."""


class NegativeMassError(OtwError):
    """A mass vector that must be nonnegative has a negative entry."""


class OracleCapError(OtwError):
    """An exact solver was asked to handle a problem beyond its size cap."""


class DatasetError(OtwError):
    """A dataset file is malformed; ``row``/``column`` locate the fault."""

    def __init__(self, message, row=None, column=None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.row = row
        self.column = column
