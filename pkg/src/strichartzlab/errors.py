"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/domain problems exit 2,
resolution/convergence/budget problems exit 3, and a verification bound
exceeded exits 1 (that last one is a result, not an exception).
"""


class StrichartzLabError(Exception):
    pass


class DomainError(StrichartzLabError, ValueError):
    """Input outside the documented domain of an operation."""


class DomainExceededError(DomainError):
    """Extreme inputs where double precision cannot represent the result."""

    def __init__(self, message, **inputs):
        self.inputs = inputs
        detail = ", ".join(f"{k}={v!r}" for k, v in inputs.items())
        super().__init__(f"{message} ({detail})" if detail else message)


class ConfigurationError(StrichartzLabError, ValueError):
    """Inconsistent or missing configuration (unknown family, bad spec...)."""


class ResolutionError(StrichartzLabError):
    """Grid too coarse for the requested computation."""

    def __init__(self, message, required=None):
        self.required = required
        if required is not None:
            message = f"{message} (required: {required})"
        super().__init__(message)


class ConvergenceError(StrichartzLabError):
    """Quadrature node-doubling failed to settle; carries the last iterates."""

    def __init__(self, message, iterates=()):
        self.iterates = tuple(iterates)
        if self.iterates:
            message = f"{message}; last iterates: {list(self.iterates)}"
        super().__init__(message)


class DivergenceFlag(StrichartzLabError):
    """A norm or multiplier is divergent for the given data."""


class ResourceBudgetError(StrichartzLabError):
    """Computation would exceed the configured resource budget."""


class TailError(StrichartzLabError):
    """Fitted tail decay too slow to control a truncated integral."""
