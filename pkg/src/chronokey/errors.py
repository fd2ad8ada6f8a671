"""Exception and warning types shared across the package."""

from __future__ import annotations


class ChronokeyError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ChronokeyError, ValueError):
    """A scalar argument or configuration value is out of its valid domain."""


class GridCoverageError(ChronokeyError, ValueError):
    """A sampling grid is too small to contain the state placed on it."""


class DecompositionError(ChronokeyError, RuntimeError):
    """A numerical factorization failed to converge."""


class ConfigError(ChronokeyError, ValueError):
    """A run-configuration document is malformed or contains unknown keys."""


class CoverageWarning(UserWarning):
    """Probability mass outside the measured window exceeds the reporting threshold."""


class ResolutionWarning(UserWarning):
    """A discretization is too coarse for the analytic approximation being reported."""


class PureNoiseWarning(UserWarning):
    """The detection model is dominated by dark counts; signal statistics are vacuous."""
