"""Exception types shared across the package.

All of these derive from LanghomError so callers can catch package
failures with a single except clause. The CLI maps input problems
(ParameterError, ShapeError, DomainError, WeightError, TruncationError)
to exit code 2 and flags that contradict guaranteed behavior
(ConsistencyError, NotSPDError, QuadratureError, ConvergenceError)
to exit code 1, alongside the non-exception theory-violation reports.
"""


class LanghomError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(LanghomError, ValueError):
    """Invalid parameter value (non-positive step, bad epsilon list, ...)."""


class ShapeError(LanghomError, ValueError):
    """Array length or grid mismatch between objects that must agree."""


class DomainError(LanghomError, ValueError):
    """Input outside the mathematical domain of an operation (zero vector, ...)."""


class WeightError(LanghomError, ValueError):
    """Weight function non-positive at a quadrature node."""


class TruncationError(LanghomError, ValueError):
    """Computational domain too small for the requested density tail bound."""


class QuadratureError(LanghomError, RuntimeError):
    """Adaptive quadrature failed to converge within the doubling budget."""


class NotSPDError(LanghomError, RuntimeError):
    """Tridiagonal elimination hit a non-positive pivot."""


class ConvergenceError(LanghomError, RuntimeError):
    """Iterative eigensolver exhausted its iteration budget.

    Carries the last Ritz values and residual norms to help diagnose
    whether the iteration stagnated or was still contracting.
    """

    def __init__(self, message, ritz_values=None, residuals=None):
        super().__init__(message)
        self.ritz_values = ritz_values
        self.residuals = residuals


class ConsistencyError(LanghomError, RuntimeError):
    """Redundant computations of the same quantity disagree beyond tolerance."""
