"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigurationError -> 2,
ResourceError -> 4; a failed verification criterion exits 3.
"""


class AndersonLabError(Exception):
    """Base class for package errors."""


class ConfigurationError(AndersonLabError, ValueError):
    """Invalid specification, config file, or precondition violation."""


class DomainError(AndersonLabError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class ResourceError(AndersonLabError):
    """Problem size beyond the configured resource limits."""


class NumericalError(AndersonLabError):
    """An underlying numerical routine failed to converge."""


class PrecisionError(AndersonLabError):
    """Requested resolution finer than the estimator can deliver."""
