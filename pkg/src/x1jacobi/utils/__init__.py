"""
Utility modules for x1jacobi.
"""

from .logging import get_logger, perf_logger, timing_decorator

__all__ = [
    "get_logger",
    "perf_logger",
    "timing_decorator",
]
