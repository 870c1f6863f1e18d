"""
Core x1jacobi components: settings, run configuration and errors.
"""

from .config import RunConfig, Settings, Tolerances, get_settings, settings
from .exceptions import (
    AdmissibilityError,
    CoverageError,
    GuardExceededError,
    IdentityFailure,
    InputValidationError,
    NonConvergenceError,
    ParameterError,
    QuadratureNonConvergence,
    X1JacobiError,
)

__all__ = [
    "settings",
    "get_settings",
    "Settings",
    "RunConfig",
    "Tolerances",
    "X1JacobiError",
    "InputValidationError",
    "ParameterError",
    "AdmissibilityError",
    "GuardExceededError",
    "CoverageError",
    "IdentityFailure",
    "NonConvergenceError",
    "QuadratureNonConvergence",
]
