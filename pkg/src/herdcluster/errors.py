"""Exception hierarchy shared across the toolkit."""


class HerdClusterError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(HerdClusterError):
    """Bad input data or configuration (CLI exit code 2)."""


class DegenerateInputError(ValidationError):
    """Input is structurally valid but statistically degenerate
    (zero variance, constant labels, ...)."""


class NumericalError(HerdClusterError):
    """A numerical routine failed to meet its contract (CLI exit code 3)."""
