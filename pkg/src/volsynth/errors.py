"""Failure classes shared across the package.

Each class maps to a distinct CLI exit code; see ``volsynth.cli``.
"""


class VolsynthError(Exception):
    """Base class for all package errors."""


class ConfigError(VolsynthError):
    """Bad configuration: missing columns, invalid split, bad hyperparameters."""


class DataError(VolsynthError):
    """Unusable data: too few rows, constant series, non-positive measures."""


class NumericalError(VolsynthError):
    """Numerical failure: non-finite objective, degenerate decomposition."""
