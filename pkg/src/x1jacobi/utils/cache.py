"""
Write-once disk cache for expensive quadrature tables.
"""

import hashlib
import threading
import time
from pathlib import Path
from typing import Any, Callable, Dict, Optional, TypeVar

import orjson

try:
    import diskcache

    DISKCACHE_AVAILABLE = True
except ImportError:
    DISKCACHE_AVAILABLE = False

from ..core.config import settings
from .logging import get_logger

T = TypeVar("T")


class CacheKey:
    """Stable cache keys built from plain values."""

    @staticmethod
    def make_key(namespace: str, *args: Any, **kwargs: Any) -> str:
        payload = orjson.dumps(
            {"args": [repr(arg) for arg in args], "kwargs": {k: repr(v) for k, v in kwargs.items()}},
            option=orjson.OPT_SORT_KEYS,
        )
        digest = hashlib.sha256(payload).hexdigest()[:24]
        return f"{namespace}:{digest}"


class CacheStats:
    """Track cache hit statistics."""

    def __init__(self) -> None:
        self.hits = 0
        self.misses = 0
        self.sets = 0
        self.errors = 0
        self.start_time = time.time()

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total > 0 else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hits": self.hits,
            "misses": self.misses,
            "sets": self.sets,
            "errors": self.errors,
            "hit_rate": self.hit_rate,
            "uptime_seconds": time.time() - self.start_time,
        }


class ResultCache:
    """
    Disk-backed write-once/read-many cache.

    A key is written at most once; later writes of the same key are ignored, so a cached
    table is never replaced by a recomputation. When disabled (the default) every call
    computes directly.
    """

    def __init__(self, directory: Optional[Path] = None, enabled: Optional[bool] = None) -> None:
        config = settings.get_cache_config()
        self.logger = get_logger(__name__)
        self.stats = CacheStats()
        self.directory = Path(directory or config["directory"])
        self.enabled = (config["enabled"] if enabled is None else enabled) and DISKCACHE_AVAILABLE
        self._size_limit = config["size_limit"]
        self._cache: Optional["diskcache.Cache"] = None
        self._lock = threading.Lock()

    def _backend(self) -> "diskcache.Cache":
        if self._cache is None:
            self.directory.mkdir(parents=True, exist_ok=True)
            self._cache = diskcache.Cache(str(self.directory), size_limit=self._size_limit)
        return self._cache

    def get_or_compute(self, key: str, compute: Callable[[], T]) -> T:
        """Return the cached value for key, computing and storing it on a miss."""
        if not self.enabled:
            return compute()
        with self._lock:
            backend = self._backend()
        try:
            value = backend.get(key, default=None)
        except Exception as exc:
            self.stats.errors += 1
            self.logger.warning(f"Cache read failed for {key}: {exc}")
            value = None
        if value is not None:
            self.stats.hits += 1
            return value  # type: ignore[no-any-return]

        self.stats.misses += 1
        value = compute()
        try:
            if backend.add(key, value):
                self.stats.sets += 1
        except Exception as exc:
            self.stats.errors += 1
            self.logger.warning(f"Cache write failed for {key}: {exc}")
        return value

    def clear(self) -> int:
        """Remove all entries; returns the number removed."""
        if not DISKCACHE_AVAILABLE:
            return 0
        return int(self._backend().clear())

    def get_stats(self) -> Dict[str, Any]:
        stats = self.stats.to_dict()
        stats["enabled"] = self.enabled
        stats["directory"] = str(self.directory)
        if self._cache is not None:
            stats["entries"] = len(self._cache)
        return stats

    def close(self) -> None:
        if self._cache is not None:
            self._cache.close()
            self._cache = None

