"""Exception types raised by the package."""


class SchmidtBenchError(Exception):
    """Base class for all package errors."""


class ValidationError(SchmidtBenchError, ValueError):
    """Malformed input: bad weights, parameters out of range."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DimensionError(ValidationError):
    """Dimension mismatch or an index outside the allowed range."""


class DomainError(ValidationError):
    """A documented precondition of a result does not hold."""


class SizeError(SchmidtBenchError):
    """An explicit enumeration or tensor power would exceed its budget."""

    def __init__(self, message, cap=None, required=None):
        super().__init__(message)
        self.cap = cap
        self.required = required


class ConvergenceError(SchmidtBenchError):
    """An iterative solver stopped before meeting its tolerance.

    ``best_value`` holds the best objective reached and ``feasible`` whether
    the corresponding iterate satisfies the constraints within tolerance.
    """

    def __init__(self, message, best_value=None, feasible=None):
        super().__init__(message)
        self.best_value = best_value
        self.feasible = feasible
