"""Exception types raised across the package."""


class ChernFlowError(Exception):
    """Base class for all package errors."""


class SingularPoint(ChernFlowError, ValueError):
    """Evaluation requested at z = 0, where the Hopf fields are undefined."""


class DimensionMismatch(ChernFlowError, ValueError):
    pass


class SingularMatrix(ChernFlowError, ArithmeticError):
    pass


class ConvergenceFailure(ChernFlowError, RuntimeError):
    pass


class ParameterOutOfRange(ChernFlowError, ValueError):
    pass


class NotPositiveDefinite(ChernFlowError, ValueError):
    """A metric matrix failed the positive-definiteness check.

    ``t`` and ``point`` identify where it happened when known.
    """

    def __init__(self, message, t=None, point=None):
        super().__init__(message)
        self.t = t
        self.point = point


class SymmetryViolation(ChernFlowError, ValueError):
    """A curvature contraction that should be real has a large imaginary part."""


class BracketInvalid(ChernFlowError, ValueError):
    """The bisection predicate does not change sign over the bracket."""
