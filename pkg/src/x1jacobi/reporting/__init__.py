"""Deterministic writers and the pipeline behind the CLI commands."""

from .pipeline import (
    Gate,
    ReportResult,
    RunContext,
    prepare,
    run_coefficients,
    run_identities,
    run_moments,
    run_recurrence,
    run_report,
    run_spectrum,
)
from .writers import ensure_output_dir, format_value, write_csv, write_json, write_table

__all__ = [
    "Gate",
    "ReportResult",
    "RunContext",
    "ensure_output_dir",
    "format_value",
    "prepare",
    "run_coefficients",
    "run_identities",
    "run_moments",
    "run_recurrence",
    "run_report",
    "run_spectrum",
    "write_csv",
    "write_json",
    "write_table",
]
