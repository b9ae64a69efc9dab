"""Exception hierarchy shared by the library and the command line tool.

Every error raised on purpose derives from :class:`UniclassError` and carries
an ``exit_code`` so the CLI can map failures to stable process exit codes:

* 2 -- bad configuration or API misuse
* 3 -- bad input data (parsing, schema, encoding, persistence)
* 4 -- numerical failure (singular systems, non-finite values)
"""

from __future__ import annotations


class UniclassError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigurationError(UniclassError, ValueError):
    """Invalid parameter values or inconsistent option combinations."""

    exit_code = 2


class StateError(UniclassError, RuntimeError):
    """Operation called on an object in the wrong state (e.g. untrained)."""

    exit_code = 2


class DataError(UniclassError, ValueError):
    """Problem with input data."""

    exit_code = 3


class ParseError(DataError):
    """A line of an input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(DataError):
    """File-level structure disagrees with the declared format."""


class EncodingError(DataError):
    """Label indices outside the declared label space."""


class StatisticsError(DataError):
    """Statistics requested for a dataset that cannot provide them."""


class ShapeError(DataError):
    """Array arguments with incompatible dimensions."""


class VersionError(DataError):
    """Persisted model written by an incompatible format version."""


class IntegrityError(DataError):
    """Persisted model file is corrupt or incomplete."""


class NumericalError(UniclassError, ArithmeticError):
    """Numerical computation failed or produced non-finite values."""

    exit_code = 4


class SingularMatrixError(NumericalError):
    """Normal equations too ill-conditioned to solve reliably."""
