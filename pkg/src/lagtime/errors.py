"""Exception taxonomy shared by all estimators.

Every failure mode raised on purpose by this package is one of the classes
below, so callers (and the command line front end) can map problems to exit
codes without string matching.
"""


class LagtimeError(Exception):
    """Base class for all errors raised deliberately by this package."""


class InvalidArgument(LagtimeError, ValueError):
    """An argument violates a documented precondition."""


class InsufficientData(LagtimeError, ValueError):
    """Not enough observations to estimate the requested quantity."""


class DegenerateInput(LagtimeError, ValueError):
    """Structurally valid input on which the result is not defined.

    Examples: a matrix whose retained rank collapses to zero under the
    configured eigenvalue cutoff, or a reducible transition matrix passed to
    a routine that needs irreducibility.
    """


class NumericalDegeneracy(LagtimeError, ArithmeticError):
    """A computation hit a numerically meaningless regime.

    Carries enough context (frame index, state index) to locate the issue.
    """


class ConvergenceFailure(LagtimeError, RuntimeError):
    """An iterative solver exhausted its iteration budget.

    Attributes
    ----------
    iterations : int
        Number of iterations performed before giving up.
    """

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


class DivergenceError(LagtimeError, ArithmeticError):
    """A simulated trajectory left the finite floating-point range.

    Attributes
    ----------
    step : int or None
        Index of the first non-finite step, when known.
    """

    def __init__(self, message: str, step: int = None):
        super().__init__(message)
        self.step = step


class UndefinedScore(LagtimeError, ValueError):
    """A score is requested in a situation where it has no meaning."""


class InternalInvariantError(LagtimeError, AssertionError):
    """An internal invariant was violated; indicates a bug, not bad input."""
