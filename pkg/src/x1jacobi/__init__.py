"""
x1jacobi - X1-Jacobi exceptional orthogonal polynomials.

- Darboux construction of the X1 family from a classical Jacobi partner
- Five-term recurrence for multiplication by Q and its limits
- Christoffel measures and their weak convergence to the arcsine law
- Spectra of the truncated band operator, checked by exact lattice-path identities
"""

__version__ = "0.1.0"
__author__ = "x1jacobi Team"

from typing import TYPE_CHECKING

from .core.config import RunConfig, settings
from .utils.logging import get_logger

if TYPE_CHECKING:
    from .polynomials.exceptional import ExceptionalBasis

logger = get_logger(__name__)


def get_basis(alpha: float, beta: float) -> "ExceptionalBasis":
    """Lazy-load the polynomial stack and build the orthonormal X1 basis for labels (alpha, beta)."""
    from .polynomials.exceptional import build_basis
    from .polynomials.jacobi import JacobiParams

    return build_basis(JacobiParams(alpha, beta))


__all__ = [
    "__version__",
    "__author__",
    "RunConfig",
    "settings",
    "get_basis",
    "logger",
]
