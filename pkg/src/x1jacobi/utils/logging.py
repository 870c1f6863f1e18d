"""
Logging setup: JSON lines on stderr via orjson, optional structlog, stage timing helpers.

Stdout is reserved for tables and summaries, so every handler here writes to stderr
or to the optional LOG_FILE.
"""

import logging
import logging.handlers
import sys
import time
from functools import lru_cache, wraps
from typing import Any, Callable, Dict, Optional, TypeVar, Union

import orjson

try:
    import structlog

    STRUCTLOG_AVAILABLE = True
except ImportError:
    STRUCTLOG_AVAILABLE = False

from ..core.config import settings

F = TypeVar("F", bound=Callable[..., Any])


class PerformanceFilter(logging.Filter):
    """Attach a microsecond timestamp and an (possibly empty) performance payload."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.timestamp_us = int(time.time() * 1_000_000)
        if not hasattr(record, "performance"):
            record.performance = {}
        return True


class OptimizedJSONFormatter(logging.Formatter):
    """JSON-lines formatter using orjson."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": record.created,
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)
        performance = getattr(record, "performance", None)
        if performance:
            log_data["performance"] = performance
        context = getattr(record, "context", None)
        if context:
            log_data["context"] = context
        return orjson.dumps(
            log_data, option=orjson.OPT_SERIALIZE_NUMPY, default=str
        ).decode("utf-8")


@lru_cache(maxsize=64)
def get_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """
    Get a cached, configured logger instance.

    Args:
        name: Logger name (typically __name__)
        level: Optional logging level override

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    log_level = level or settings.monitoring.LOG_LEVEL
    logger.setLevel(getattr(logging, log_level.upper(), logging.WARNING))
    logger.propagate = False
    logger.addFilter(PerformanceFilter())

    if settings.monitoring.ENABLE_STRUCTURED_LOGGING and STRUCTLOG_AVAILABLE:
        _configure_structlog(logger)
    _configure_standard_logging(logger)
    return logger


def set_level(level: str) -> None:
    """Change the level of every logger handed out so far (used by --debug)."""
    numeric = getattr(logging, level.upper(), logging.WARNING)
    for name in list(logging.root.manager.loggerDict):
        if name == "x1jacobi" or name.startswith("x1jacobi."):
            logging.getLogger(name).setLevel(numeric)


def _configure_structlog(logger: logging.Logger) -> None:
    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="ISO"),
        structlog.dev.ConsoleRenderer() if settings.DEBUG else structlog.processors.JSONRenderer(),
    ]
    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(logger.level),
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def _configure_standard_logging(logger: logging.Logger) -> None:
    console_handler = logging.StreamHandler(sys.stderr)
    if settings.DEBUG:
        formatter: logging.Formatter = logging.Formatter(
            fmt="%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(message)s",
            datefmt="%H:%M:%S",
        )
    else:
        formatter = OptimizedJSONFormatter()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if settings.LOG_FILE is not None:
        settings.LOG_FILE.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            filename=settings.LOG_FILE,
            maxBytes=10 * 1024 * 1024,
            backupCount=5,
            encoding="utf-8",
        )
        file_handler.setFormatter(OptimizedJSONFormatter())
        logger.addHandler(file_handler)


class PerformanceLogger:
    """Logger for stage durations and scalar diagnostics."""

    def __init__(self) -> None:
        self.logger = get_logger("x1jacobi.performance")
        self._start_times: Dict[str, float] = {}

    def start_timing(self, operation: str) -> None:
        self._start_times[operation] = time.perf_counter()

    def end_timing(self, operation: str, **kwargs: Any) -> float:
        if operation not in self._start_times:
            self.logger.warning(f"No start time found for operation: {operation}")
            return 0.0
        duration = time.perf_counter() - self._start_times.pop(operation)
        self.logger.info(
            f"Operation completed: {operation}",
            extra={
                "performance": {
                    "operation": operation,
                    "duration_seconds": duration,
                    "duration_ms": duration * 1000,
                    **kwargs,
                }
            },
        )
        return duration

    def log_metric(self, name: str, value: Union[int, float], unit: str = "", **kwargs: Any) -> None:
        self.logger.info(
            f"Metric: {name}",
            extra={
                "performance": {
                    "metric_name": name,
                    "metric_value": value,
                    "metric_unit": unit,
                    **kwargs,
                }
            },
        )


perf_logger = PerformanceLogger()


def timing_decorator(operation_name: Optional[str] = None) -> Callable[[F], F]:
    """Decorator to time function execution through perf_logger."""

    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            op_name = operation_name or f"{func.__module__}.{func.__name__}"
            perf_logger.start_timing(op_name)
            try:
                return func(*args, **kwargs)
            finally:
                perf_logger.end_timing(op_name)

        return wrapper  # type: ignore[return-value]

    return decorator


root_logger = get_logger("x1jacobi")
