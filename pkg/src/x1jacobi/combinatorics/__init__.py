"""Exact lattice-path engine and the identity suites built on it."""

from .identities import Counterexample, SuiteResult, first_counterexample, run_all
from .paths import (
    PathModel,
    S_bruteforce,
    S_closed,
    arcsine_Q_moment,
    brute_force_sum,
    c_closed,
    level_weighted_sum,
    limit_weight,
    s_closed,
    s_half,
    transfer_sum,
    wallis_moment,
)

__all__ = [
    "Counterexample",
    "PathModel",
    "S_bruteforce",
    "S_closed",
    "SuiteResult",
    "arcsine_Q_moment",
    "brute_force_sum",
    "c_closed",
    "first_counterexample",
    "level_weighted_sum",
    "limit_weight",
    "run_all",
    "s_closed",
    "s_half",
    "transfer_sum",
    "wallis_moment",
]
