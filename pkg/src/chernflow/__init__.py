"""Explicit Chern-Ricci flow on Hopf manifolds and its curvature signs."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BracketInvalid,
    ChernFlowError,
    ConvergenceFailure,
    DimensionMismatch,
    NotPositiveDefinite,
    ParameterOutOfRange,
    SingularMatrix,
    SingularPoint,
    SymmetryViolation,
)
from .hopf import HopfFamily, HopfQuotient, LambdaMetric  # noqa: E402
