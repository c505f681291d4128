"""Run configuration: defaults, a JSON file, QC_* environment variables and CLI overrides."""

import json
import os
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ValidationError, field_validator

from src.errors import InputError

# env var -> RunConfig field
ENV_OVERRIDES = {
    "QC_TRUNC": "truncation",
    "QC_TOL": "tol",
    "QC_GRID": "grid_size",
    "QC_RESTARTS": "restarts",
    "QC_SEED": "seed",
}


class RunConfig(BaseModel):
    truncation: int = 64
    tol: float = 1e-8
    grid_size: int = 256
    restarts: int = 5
    seed: int = 0
    out: Optional[str] = None
    format: Literal["json", "csv"] = "json"

    @field_validator("truncation", "grid_size", "restarts")
    @classmethod
    def _positive_int(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("seed")
    @classmethod
    def _seed_non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("seed must be non-negative")
        return value

    @field_validator("tol")
    @classmethod
    def _tol_range(cls, value: float) -> float:
        if not 0 < value < 1:
            raise ValueError("tol must lie in (0, 1)")
        return value


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Defaults < JSON file < QC_* environment < explicit overrides."""
    values: Dict[str, Any] = {}

    if path:
        try:
            with open(path, "r", encoding="utf-8") as f:
                values.update(json.load(f))
        except (IOError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc

    for env_name, field in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is not None:
            values[field] = raw

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise InputError(f"invalid configuration: {exc}") from exc
