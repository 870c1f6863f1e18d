"""
Configuration management: environment-driven settings plus the validated run configuration.
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import orjson
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic import ValidationError as PydanticValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import InputValidationError


class QuadratureSettings(BaseSettings):
    """Adaptive Gauss-Jacobi quadrature protocol."""

    INITIAL_NODES: int = Field(default=64)
    MAX_NODES: int = Field(default=2**15)
    GOLUB_WELSCH_MAX_NODES: int = Field(default=1024)
    RELATIVE_TOL: float = Field(default=1e-12)

    @field_validator("INITIAL_NODES", "MAX_NODES", "GOLUB_WELSCH_MAX_NODES")
    @classmethod
    def validate_node_counts(cls, v: int) -> int:
        """Node counts must be positive."""
        return max(1, v)


class PathSettings(BaseSettings):
    """Exact lattice-path engine limits."""

    ENUMERATION_GUARD: int = Field(default=10**8)
    # Identity suites enumerate plainly up to this many step sequences, then switch to the level DP.
    SUITE_ENUMERATION_LIMIT: int = Field(default=5**8)


class PerformanceSettings(BaseSettings):
    """Worker pool and result cache."""

    MAX_WORKERS: int = Field(default_factory=lambda: min(32, (os.cpu_count() or 1) + 4))
    ENABLE_RESULT_CACHE: bool = Field(default=False)
    CACHE_SIZE_MB: int = Field(default=512)

    @field_validator("MAX_WORKERS")
    @classmethod
    def validate_max_workers(cls, v: int) -> int:
        """Ensure worker count is reasonable."""
        return max(1, min(v, 64))


class MonitoringSettings(BaseSettings):
    """Logging and stage monitoring."""

    ENABLE_PERFORMANCE_MONITORING: bool = Field(default=True)
    LOG_LEVEL: str = Field(default="WARNING")
    ENABLE_STRUCTURED_LOGGING: bool = Field(default=False)


class Settings(BaseSettings):
    """Main application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    APP_NAME: str = Field(default="x1jacobi")
    DEBUG: bool = Field(default=False)
    VERSION: str = Field(default="0.1.0")

    CACHE_DIR: Path = Field(default_factory=lambda: Path(".cache") / "x1jacobi")
    LOG_FILE: Optional[Path] = Field(default=None)

    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    paths: PathSettings = Field(default_factory=PathSettings)
    performance: PerformanceSettings = Field(default_factory=PerformanceSettings)
    monitoring: MonitoringSettings = Field(default_factory=MonitoringSettings)

    def get_cache_config(self) -> Dict[str, Any]:
        """Disk cache configuration."""
        return {
            "directory": self.CACHE_DIR / "results",
            "size_limit": self.performance.CACHE_SIZE_MB * 1024 * 1024,
            "enabled": self.performance.ENABLE_RESULT_CACHE,
        }


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()


class Tolerances(BaseModel):
    """Acceptance thresholds for the report gates."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    identity_tol: float = Field(default=1e-8, gt=0)
    asym_gate: float = Field(default=0.05, gt=0)
    retained_gate: float = Field(default=0.9, gt=0, le=1)


class RunConfig(BaseModel):
    """Resolved configuration of one pipeline run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float = 2.0
    beta: float = 1.0
    N_values: List[int] = Field(default_factory=lambda: [50, 100, 200, 400])
    k_max: int = Field(default=6, ge=1)
    l_max: int = Field(default=5, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output_dir: Path = Path("results")
    format: Literal["csv", "json"] = "csv"

    @field_validator("alpha", "beta")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        if v != v or v in (float("inf"), float("-inf")):
            raise ValueError("must be a finite real")
        return v

    @field_validator("N_values")
    @classmethod
    def validate_n_values(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("N_values must not be empty")
        if any(n < 1 for n in v):
            raise ValueError("N_values entries must be >= 1")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("N_values must be strictly increasing")
        return v

    @classmethod
    def from_sources(
        cls, config_file: Optional[Path] = None, **overrides: Any
    ) -> "RunConfig":
        """
        Build a config from an optional JSON file and flag overrides.

        Flags that are None are treated as unset, so file values survive.
        """
        data: Dict[str, Any] = {}
        if config_file is not None:
            try:
                loaded = orjson.loads(Path(config_file).read_bytes())
            except (OSError, orjson.JSONDecodeError) as exc:
                raise InputValidationError(
                    f"Cannot read config file {config_file}: {exc}"
                ) from exc
            if not isinstance(loaded, dict):
                raise InputValidationError("Config file must contain a JSON object")
            data.update(loaded)
        data.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls.model_validate(data)
        except PydanticValidationError as exc:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
            )
            raise InputValidationError(f"Invalid run configuration: {problems}") from exc

    def to_json(self) -> bytes:
        """Deterministic JSON echo for provenance."""
        return orjson.dumps(
            self.model_dump(mode="json"),
            option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2,
        )
