"""
Exception hierarchy for the ring analysis toolkit
"""
from typing import Any, Optional


class RingError(Exception):
    """Base class for all toolkit errors"""


class RingParameterError(RingError, ValueError):
    """Invalid parameters, lengths or preconditions"""


class SingularTransformError(RingParameterError):
    """Large-s rescaling requested with s = 0"""


class OutOfRegimeError(RingParameterError):
    """Asymptotic formula requested outside its regime"""


class DegenerateInputError(RingParameterError):
    """Input makes the requested object degenerate"""


class InvalidEigenvalueError(RingParameterError):
    """Value is not a root of the characteristic polynomial"""


class BranchNotBornError(RingParameterError):
    """The requested branch does not exist at this alpha"""


class NumericalFailureError(RingError):
    """A numerical procedure failed; carries the best estimate available"""

    def __init__(self, message: str, estimate: Optional[Any] = None):
        super().__init__(message)
        self.estimate = estimate


class DegenerateNormalizationError(NumericalFailureError):
    """Adjoint normalization constant vanishes"""


class ResonanceDegenerateError(NumericalFailureError):
    """Onset frequency is zero"""


class BifurcationPointError(NumericalFailureError):
    """Newton Jacobian is singular"""


class NonConvergenceError(NumericalFailureError):
    """Iteration budget exhausted; estimate holds the last iterate"""


class SeedError(NumericalFailureError):
    """Continuation could not start from its seed"""


class StaleOrbitError(NumericalFailureError):
    """Orbit no longer satisfies its defining equations"""


class IntegrationError(NumericalFailureError):
    """Integrator failed or produced non-finite states"""


class PhaseUndefinedError(NumericalFailureError):
    """No node carries a measurable phase"""
