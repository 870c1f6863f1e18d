"""Classical Jacobi polynomials, Gauss-Jacobi quadrature and the X1 construction."""

from .darboux import DarbouxData, ExactDarboux, solve_riccati
from .exceptional import (
    ExceptionalBasis,
    adjoint_defect,
    apply_A,
    apply_B,
    build_basis,
    exceptional_polynomial,
    exceptional_table,
    exceptional_weight,
    gram_matrix,
    integrate_w,
    ode_residual,
    orthonormal_exceptional_eval,
)
from .jacobi import (
    JacobiParams,
    StructureCoeffs,
    coefficient_table,
    eigenvalue,
    normalized_moment,
    orthonormal_eval,
    orthonormal_table,
    recurrence_coeffs,
    structure_coeffs,
)
from .quadrature import QuadratureRule, gauss_rule, integrate

__all__ = [
    "DarbouxData",
    "ExactDarboux",
    "ExceptionalBasis",
    "JacobiParams",
    "QuadratureRule",
    "StructureCoeffs",
    "adjoint_defect",
    "apply_A",
    "apply_B",
    "build_basis",
    "coefficient_table",
    "eigenvalue",
    "exceptional_polynomial",
    "exceptional_table",
    "exceptional_weight",
    "gauss_rule",
    "gram_matrix",
    "integrate",
    "integrate_w",
    "normalized_moment",
    "ode_residual",
    "orthonormal_eval",
    "orthonormal_exceptional_eval",
    "orthonormal_table",
    "recurrence_coeffs",
    "solve_riccati",
    "structure_coeffs",
]
