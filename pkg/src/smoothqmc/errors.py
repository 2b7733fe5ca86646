"""Shared exception types.

ConfigError maps to CLI exit code 2, NumericalError (and subclasses) to 3.
"""


class ConfigError(Exception):
    """Bad or inconsistent configuration input."""


class NumericalError(Exception):
    """A numerical procedure failed to reach its contract."""


class DimensionTableError(NumericalError):
    """Requested dimension exceeds the bundled direction-number table."""


class NoEsscherRootError(NumericalError):
    """The martingale equation for the Esscher parameter has no root in range."""


class DistributionBuildError(NumericalError):
    """Numerical CDF/inverse-CDF construction failed its self checks."""


class DegenerateWeightError(NumericalError):
    """Weight matrix is rank deficient (or has a zero tail block)."""
