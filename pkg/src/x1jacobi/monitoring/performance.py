"""
Stage timing and memory tracking for pipeline runs.

Metrics are logged and reported on request; they never enter result files.
"""

import threading
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass
from functools import wraps
from typing import Any, Callable, Dict, Iterator, List, Optional, TypeVar

import psutil

from ..core.config import settings
from ..utils.logging import get_logger, perf_logger

F = TypeVar("F", bound=Callable[..., Any])


@dataclass
class StageMetrics:
    """Aggregated metrics for one named stage."""

    call_count: int = 0
    total_time: float = 0.0
    min_time: float = float("inf")
    max_time: float = 0.0
    memory_impact_mb: float = 0.0
    peak_rss_mb: float = 0.0

    @property
    def avg_time(self) -> float:
        return self.total_time / self.call_count if self.call_count else 0.0


class PerformanceMonitor:
    """Collects per-stage durations and RSS deltas; thread-safe."""

    def __init__(self, enabled: bool = True) -> None:
        self.logger = get_logger(__name__)
        self.enabled = enabled
        self.stage_metrics: Dict[str, StageMetrics] = defaultdict(StageMetrics)
        self._lock = threading.Lock()

    @contextmanager
    def measure(self, stage: str) -> Iterator[None]:
        """Context manager measuring one execution of a stage."""
        if not self.enabled:
            yield
            return
        process = psutil.Process()
        start_rss = process.memory_info().rss
        start_time = time.perf_counter()
        try:
            yield
        finally:
            duration = time.perf_counter() - start_time
            end_rss = process.memory_info().rss
            with self._lock:
                metrics = self.stage_metrics[stage]
                metrics.call_count += 1
                metrics.total_time += duration
                metrics.min_time = min(metrics.min_time, duration)
                metrics.max_time = max(metrics.max_time, duration)
                metrics.memory_impact_mb += (end_rss - start_rss) / 1024 / 1024
                metrics.peak_rss_mb = max(metrics.peak_rss_mb, end_rss / 1024 / 1024)
            perf_logger.log_metric(f"stage.{stage}", duration, "s")

    def get_performance_report(self) -> Dict[str, Any]:
        """Per-stage summary sorted by total time."""
        with self._lock:
            items = sorted(
                self.stage_metrics.items(), key=lambda item: item[1].total_time, reverse=True
            )
            stages = {
                name: {
                    "call_count": m.call_count,
                    "avg_time_ms": m.avg_time * 1000,
                    "min_time_ms": m.min_time * 1000,
                    "max_time_ms": m.max_time * 1000,
                    "total_time_s": m.total_time,
                    "memory_impact_mb": m.memory_impact_mb,
                    "peak_rss_mb": m.peak_rss_mb,
                }
                for name, m in items
            }
        return {"timestamp": time.time(), "stages": stages, "memory": get_memory_usage()}

    def slow_stages(self, threshold_s: float = 60.0) -> List[str]:
        with self._lock:
            return [name for name, m in self.stage_metrics.items() if m.total_time > threshold_s]

    def reset(self) -> None:
        with self._lock:
            self.stage_metrics.clear()


performance_monitor = PerformanceMonitor(
    enabled=settings.monitoring.ENABLE_PERFORMANCE_MONITORING
)


def performance_track(stage: Optional[str] = None) -> Callable[[F], F]:
    """Decorator recording every call of the wrapped function as a stage."""

    def decorator(func: F) -> F:
        name = stage or f"{func.__module__}.{func.__qualname__}"

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            with performance_monitor.measure(name):
                return func(*args, **kwargs)

        return wrapper  # type: ignore[return-value]

    return decorator


def get_memory_usage() -> Dict[str, float]:
    """Current process memory usage."""
    try:
        process = psutil.Process()
        memory_info = process.memory_info()
        return {
            "rss_mb": memory_info.rss / 1024 / 1024,
            "vms_mb": memory_info.vms / 1024 / 1024,
            "percent": process.memory_percent(),
        }
    except psutil.Error as e:
        get_logger(__name__).error(f"Error getting memory usage: {e}")
        return {}
