"""Exception types raised by the toolkit.

The CLI maps these onto distinct exit codes, so keep the hierarchy flat:
plain ``ValueError`` means a bad parameter, the subclasses below mark
conditions that are well-formed requests with no defined answer.
"""


class ZeroProbabilityOutcomeError(ValueError):
    """The requested outcome has zero probability at every phase value."""


class StationaryPointError(ValueError):
    """The mean observable has zero slope at the working point, so the
    error-propagation sensitivity is undefined there."""


class UndefinedCircularMeanError(ValueError):
    """The circular resultant vector has (numerically) zero length; the
    circular mean of the distribution is undefined."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured resource cap."""
