"""
Performance monitoring components for x1jacobi.
"""

from .performance import (
    PerformanceMonitor,
    StageMetrics,
    get_memory_usage,
    performance_monitor,
    performance_track,
)

__all__ = [
    "PerformanceMonitor",
    "StageMetrics",
    "performance_monitor",
    "performance_track",
    "get_memory_usage",
]
