"""Exception and warning types shared across the package."""


class IvkitError(Exception):
    """Base class for all ivkit errors."""


class CsvParseError(IvkitError, ValueError):
    """Malformed CSV input (ragged row, unparseable cell)."""


class SchemaError(IvkitError, ValueError):
    """Invalid table schema (duplicate or empty column names)."""


class NonFiniteValueError(IvkitError, ValueError):
    """A loaded cell is NaN or infinite."""


class UnknownVariableError(IvkitError, KeyError):
    """A requested variable name does not exist in the dataset."""


class ShapeMismatchError(IvkitError, ValueError):
    """Input vectors disagree in length or dimensionality."""


class DegenerateVarianceError(IvkitError, ValueError):
    """A variable has (numerically) zero sample variance."""


class DegenerateConditioningError(IvkitError, ValueError):
    """Partial correlation requested with a perfectly correlated conditioner."""


class InsufficientSampleError(IvkitError, ValueError):
    """Too few observations for the requested statistic."""


class SingularSystemError(IvkitError, ValueError):
    """Design or instrument matrix is rank deficient."""


class WeakInstrumentError(IvkitError, ValueError):
    """Instrument-treatment correlation is numerically zero."""


class PositivityError(IvkitError, ValueError):
    """A (treatment, confounder-level) cell has no observations."""


class ReplicateFailure(IvkitError, RuntimeError):
    """A Monte Carlo replicate hit a degenerate estimator.

    The message carries the replicate index and derived seed so the
    failure can be reproduced in isolation.
    """


class UsageError(IvkitError, ValueError):
    """Invalid command-line arguments (maps to exit code 64)."""


class WeakInstrumentWarning(UserWarning):
    """First-stage fit is weak; estimates may be unstable."""


class DegenerateColumnWarning(UserWarning):
    """A search candidate was skipped because a column is degenerate."""


class CollinearityWarning(UserWarning):
    """Adjustment covariates are nearly collinear."""
