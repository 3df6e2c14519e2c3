"""
Exception hierarchy - each error kind maps to a CLI exit status.
"""

from .config import EXIT_DATA, EXIT_NUMERIC, EXIT_USAGE


class MnntsError(Exception):
    """Base class for all errors raised by the package."""

    exit_status = EXIT_NUMERIC


class ArgumentError(MnntsError, ValueError):
    """Invalid argument: shapes, permutations, partitions, flags."""

    exit_status = EXIT_USAGE


class MultiIndexError(MnntsError, IndexError):
    """Multi-index component outside 0..M_s."""

    exit_status = EXIT_USAGE


class DataError(MnntsError, ValueError):
    """Unusable input data (ingestion failures, too few observations)."""

    exit_status = EXIT_DATA


class DegenerateDataError(DataError):
    """Data for which the requested statistic is undefined."""


class NumericError(MnntsError, ArithmeticError):
    """Numerical failure: non-convergence, non-finite values."""

    exit_status = EXIT_NUMERIC


class DegenerateInputError(NumericError):
    """Parameter vector that cannot be normalized."""


class DegenerateConditioningError(NumericError):
    """Conditioning point where the conditioning block has (near) zero density."""

    def __init__(self, message: str, marginal_density: float):
        super().__init__(message)
        self.marginal_density = marginal_density
