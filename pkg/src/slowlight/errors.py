"""Exception hierarchy.

Two families matter to callers: configuration problems (bad files, bad
values) and numerical guards that trip at run time. The command line maps
the former to exit code 2 and the latter to exit code 3.
"""

from __future__ import annotations


class SlowlightError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SlowlightError):
    """Invalid configuration: bad value, malformed file, missing file."""


class CatalogError(ConfigError):
    """Malformed or unresolvable line-catalog file."""


class DensityRangeError(ConfigError):
    """Temperature outside the vapor-pressure fit's validity range."""


class NumericsError(SlowlightError):
    """A numerical guard tripped during computation."""


class ModelValidityError(NumericsError):
    """Susceptibility too large for the weak-vapor index expansion."""


class GridError(NumericsError):
    """Sampling grid cannot represent the requested pulse faithfully."""


class WraparoundError(NumericsError):
    """Propagated envelope reached the edge of the periodic time window."""


class RootNotFoundError(NumericsError):
    """Bracketing interval does not contain a sign change."""


class SingularRegimeError(NumericsError):
    """Regime-length ratio undefined at the degenerate line splitting."""


class CalibrationError(NumericsError):
    """Density calibration factor outside the accepted bounds."""


class MetricUndefinedError(NumericsError):
    """Requested metric is not defined for the given envelope."""
