"""Service configuration from JSON files and BIMNAV_* environment keys."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from ..errors import ConfigError

_METRICS = ("euclidean", "route")


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the server and the simulator need to start.

    ``llm_url`` and ``encoder_url`` left unset select the built-in
    rule-based client and reference encoder, keeping the service fully
    offline-capable.
    """

    model_path: str
    host: str = "127.0.0.1"
    port: int = 8080
    cache_path: str | None = None
    llm_url: str | None = None
    llm_model: str = "guide-chat"
    encoder_url: str | None = None
    cell_size_m: float = 0.25
    tick_hz: float = 10.0
    top_n: int = 5
    distance_metric: str = "euclidean"
    log_dir: str | None = None

    def __post_init__(self) -> None:
        if not self.model_path:
            raise ConfigError("model_path must point at a building model")
        if not 0 < self.port < 65536:
            raise ConfigError(f"port out of range: {self.port}")
        if self.tick_hz <= 0:
            raise ConfigError(f"tick_hz must be positive, got {self.tick_hz}")
        if self.cell_size_m <= 0:
            raise ConfigError(f"cell_size_m must be positive, got {self.cell_size_m}")
        if self.top_n < 1:
            raise ConfigError(f"top_n must be at least 1, got {self.top_n}")
        if self.distance_metric not in _METRICS:
            raise ConfigError(
                f"distance_metric must be one of {_METRICS}, got {self.distance_metric!r}"
            )

    @property
    def tick_dt(self) -> float:
        return 1.0 / self.tick_hz


_ENV_KEYS = {
    "BIMNAV_MODEL": ("model_path", str),
    "BIMNAV_HOST": ("host", str),
    "BIMNAV_PORT": ("port", int),
    "BIMNAV_CACHE": ("cache_path", str),
    "BIMNAV_LLM_URL": ("llm_url", str),
    "BIMNAV_LLM_MODEL": ("llm_model", str),
    "BIMNAV_ENCODER_URL": ("encoder_url", str),
    "BIMNAV_CELL_SIZE": ("cell_size_m", float),
    "BIMNAV_TICK_HZ": ("tick_hz", float),
    "BIMNAV_TOP_N": ("top_n", int),
    "BIMNAV_DISTANCE_METRIC": ("distance_metric", str),
    "BIMNAV_LOG_DIR": ("log_dir", str),
}


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    **overrides: object,
) -> ServiceConfig:
    """Build a config: file values, then environment, then explicit overrides."""
    env = os.environ if env is None else env
    values: dict[str, object] = {}

    if path is not None:
        try:
            raw = json.loads(Path(path).read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        known = {f.name for f in fields(ServiceConfig)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values.update(raw)

    for key, (field_name, cast) in _ENV_KEYS.items():
        if key in env:
            try:
                values[field_name] = cast(env[key])
            except ValueError as exc:
                raise ConfigError(f"{key}={env[key]!r} is not a valid {cast.__name__}") from exc

    values.update({k: v for k, v in overrides.items() if v is not None})

    if "model_path" not in values:
        raise ConfigError("model_path missing: set it in the config file, BIMNAV_MODEL, or --model")
    try:
        return ServiceConfig(**values)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
