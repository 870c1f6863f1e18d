"""Band coefficients, Christoffel measures and the projected multiplication operator."""

from .christoffel import ChristoffelReport, density_samples, diag_inner, kernel_diag, moment_table, mu_moment
from .recurrence import (
    RecurrenceTable,
    asymptotic_U,
    build_table,
    compute_u,
    convergence_table,
    corollary_b_check,
    is_in_stabilizer,
    stabilizer_expansion,
)
from .spectrum import (
    BandMatrix,
    SpectralReport,
    build_JN,
    cdf_compare,
    eigenvalues,
    moment_gap,
    pull_back,
    trace_moment_full,
    trace_moment_proj,
)

__all__ = [
    "BandMatrix",
    "ChristoffelReport",
    "RecurrenceTable",
    "SpectralReport",
    "asymptotic_U",
    "build_JN",
    "build_table",
    "cdf_compare",
    "compute_u",
    "convergence_table",
    "corollary_b_check",
    "density_samples",
    "diag_inner",
    "eigenvalues",
    "is_in_stabilizer",
    "kernel_diag",
    "moment_gap",
    "moment_table",
    "mu_moment",
    "pull_back",
    "stabilizer_expansion",
    "trace_moment_full",
    "trace_moment_proj",
]
