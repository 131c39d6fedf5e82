"""Exception hierarchy shared by every module.

The CLI maps each family to an exit status, so new errors should subclass
one of the two leaf families below rather than ``InterventionError``.
"""


class InterventionError(Exception):
    """Base class for all package errors."""


class DataError(InterventionError, ValueError):
    """Malformed, inconsistent or infeasible input data (exit status 3)."""


class GraphFormatError(DataError):
    """An edge-list or manifest file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class GraphValidationError(DataError):
    """A graph violates a structural invariant (negative weight, duplicate edge, ...)."""


class InfeasibleBudgetError(DataError):
    """The requested budget exceeds the total reducible weight."""


class NumericalError(InterventionError, ArithmeticError):
    """A numerical routine failed (exit status 4)."""


class SvdConvergenceError(NumericalError):
    """Truncated SVD did not reach the requested residual within the cycle cap."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class ProductOverflowError(NumericalError):
    """The product of a graph sequence is not representable in float64."""


class FeasibilityError(NumericalError):
    """An intervention violates its box or budget constraints."""


class DegenerateSpectrumWarning(RuntimeWarning):
    """The r-th and (r+1)-th singular values are numerically tied.

    Scores are then a subgradient rather than the gradient.
    """
