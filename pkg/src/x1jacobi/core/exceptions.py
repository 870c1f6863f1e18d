"""
Exception hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI maps it to:
validation problems exit with 1, numerical non-convergence with 2.
"""

from typing import Any, Dict, List, Optional, Sequence


class X1JacobiError(Exception):
    """Base class for all package errors."""

    exit_code: int = 1

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_dict(self) -> Dict[str, Any]:
        """Structured form used in logs and summaries."""
        return {"error": type(self).__name__, "message": self.message, **self.context}


class InputValidationError(X1JacobiError):
    """Invalid input or configuration (exit code 1)."""

    exit_code = 1


class ParameterError(InputValidationError):
    """A parameter lies outside its admissible range (alpha, beta, n, x, m)."""


class AdmissibilityError(InputValidationError):
    """The X1 construction has no (or no unique) admissible Darboux branch."""

    def __init__(
        self,
        message: str,
        branches: Optional[Sequence[Dict[str, Any]]] = None,
        **context: Any,
    ) -> None:
        super().__init__(message, **context)
        self.branches: List[Dict[str, Any]] = list(branches or [])

    def __str__(self) -> str:
        if not self.branches:
            return self.message
        lines = [self.message]
        for branch in self.branches:
            details = ", ".join(f"{key}={value}" for key, value in branch.items())
            lines.append(f"  branch: {details}")
        return "\n".join(lines)


class GuardExceededError(InputValidationError):
    """Brute-force enumeration would exceed the configured size guard."""


class CoverageError(InputValidationError):
    """A recurrence table does not cover the rows an operation needs."""


class OutputError(InputValidationError):
    """The output directory cannot be created or written."""


class NonConvergenceError(X1JacobiError):
    """A numerical procedure failed to converge (exit code 2)."""

    exit_code = 2


class QuadratureNonConvergence(NonConvergenceError):
    """Adaptive quadrature exceeded the maximum node count."""


class EigensolverFailure(NonConvergenceError):
    """A symmetric eigensolve did not converge."""


class IdentityFailure(X1JacobiError):
    """An exact identity suite found a counterexample."""

    exit_code = 1
