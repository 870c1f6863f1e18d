"""Tests for the run configuration and settings."""

import orjson
import pytest

from x1jacobi.core.config import RunConfig, Settings, Tolerances, settings
from x1jacobi.core.exceptions import InputValidationError


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert (config.alpha, config.beta) == (2.0, 1.0)
        assert config.N_values == [50, 100, 200, 400]
        assert config.format == "csv"
        assert config.tolerances == Tolerances()

    @pytest.mark.parametrize(
        "overrides",
        [
            {"N_values": []},
            {"N_values": [100, 50]},
            {"N_values": [0, 10]},
            {"k_max": 0},
            {"format": "xml"},
            {"alpha": float("nan")},
            {"unknown": 1},
        ],
    )
    def test_rejects(self, overrides):
        with pytest.raises(InputValidationError, match="Invalid run configuration"):
            RunConfig.from_sources(**overrides)

    def test_none_overrides_are_unset(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_bytes(orjson.dumps({"alpha": 3.0, "N_values": [10, 20]}))
        config = RunConfig.from_sources(path, alpha=None, N_values=None, beta=1.0)
        assert config.alpha == 3.0
        assert config.N_values == [10, 20]

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_bytes(orjson.dumps({"alpha": 3.0, "tolerances": {"asym_gate": 0.1}}))
        config = RunConfig.from_sources(path, alpha=0.5, beta=1.5)
        assert (config.alpha, config.beta) == (0.5, 1.5)
        assert config.tolerances.asym_gate == 0.1

    def test_bad_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(InputValidationError, match="Cannot read config file"):
            RunConfig.from_sources(path)

    def test_file_must_hold_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(InputValidationError, match="JSON object"):
            RunConfig.from_sources(path)

    def test_to_json_is_sorted(self):
        payload = orjson.loads(RunConfig(N_values=[5]).to_json())
        assert list(payload) == sorted(payload)
        assert payload["N_values"] == [5]
        assert payload["output_dir"] == "results"


class TestSettings:
    def test_sections(self):
        assert settings.quadrature.RELATIVE_TOL == 1e-12
        assert settings.paths.SUITE_ENUMERATION_LIMIT == 5**8
        assert 1 <= settings.performance.MAX_WORKERS <= 64

    def test_cache_config(self):
        config = Settings().get_cache_config()
        assert config["enabled"] is False
        assert config["directory"].name == "results"

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("DEBUG", "true")
        assert Settings().DEBUG is True
