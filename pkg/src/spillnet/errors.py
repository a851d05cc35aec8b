"""Exception hierarchy for the spillnet toolkit.

Every error raised by the library derives from :class:`SpillnetError`, so
callers (CLI, service) can map failures to exit codes / HTTP responses with a
single except clause.
"""


class SpillnetError(Exception):
    """Base class for all spillnet errors."""


class ParseError(SpillnetError):
    """A source file could not be parsed; message carries the line number."""


class AlignmentError(SpillnetError):
    """Calendar intersection dropped more dates than the configured tolerance."""


class ValidationError(SpillnetError):
    """An input value violates a domain invariant (names series and date)."""


class LengthError(SpillnetError):
    """A series or sample is too short for the requested operation."""


class DegenerateSeriesError(SpillnetError):
    """A constant series for which higher-moment statistics are undefined."""


class SingularDesignError(SpillnetError):
    """The regression design matrix is rank deficient."""


class DegenerateCovarianceError(SpillnetError):
    """Residual covariance has a non-positive diagonal entry."""


class DegenerateVarianceError(SpillnetError):
    """A variable has zero forecast-error variance at the requested horizon."""


class SchemaError(SpillnetError):
    """Mismatched identifiers between objects that must describe the same panel."""


class SliceError(SpillnetError):
    """A requested date range selects no observations."""


class ConvergenceError(SpillnetError):
    """An iterative solver failed to converge within its iteration budget."""
