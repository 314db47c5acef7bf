"""Run configuration: a YAML file validated by pydantic, plus dotted overrides."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Iterable, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError

SOLVER_ENV = "PROTOINV_SOLVER"


class SolverConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    transport: Literal["auto", "process", "embedded", "dimacs"] = "auto"
    path: str | None = None
    args: tuple[str, ...] = ()
    timeout_s: float = Field(default=60.0, gt=0)
    seed: int = Field(default=0, ge=0)
    logic: str = Field(default="ALL", min_length=1)
    transcript_dir: str | None = None
    sat_path: str | None = None


class EngineConfig(BaseModel):
    """Budgets and boosting toggles; a budget of None is unlimited."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    max_seconds: float | None = Field(default=None, gt=0)
    max_obligations: int | None = Field(default=None, ge=1)
    max_frames: int | None = Field(default=None, ge=1)
    max_memory_mb: int | None = Field(default=None, ge=1)
    debug_checks: bool = False
    symmetry: bool = True
    range: bool = True
    push_forward: bool = True
    subsume: bool = True


class ConvergenceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    max_size: dict[str, int] = Field(default_factory=dict)
    semantic_gate: bool = True

    @field_validator("max_size")
    @classmethod
    def positive_sizes(cls, value: dict[str, int]) -> dict[str, int]:
        for sort, size in value.items():
            if size < 1:
                raise ValueError(f"max_size for {sort} must be positive")
        return value


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    dir: str = "runs"
    minimize: bool = True


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    solver: SolverConfig = Field(default_factory=SolverConfig)
    engine: EngineConfig = Field(default_factory=EngineConfig)
    convergence: ConvergenceConfig = Field(default_factory=ConvergenceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)


def _coerce(text: str) -> Any:
    """Override values are read as YAML scalars, so `10`, `true` and `null` keep their types."""

    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def apply_overrides(data: dict[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    merged = dict(data)
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {item!r} must look like section.key=value")
        parts = key.strip().split(".")
        cursor = merged
        for part in parts[:-1]:
            nested = cursor.get(part)
            nested = dict(nested) if isinstance(nested, dict) else {}
            cursor[part] = nested
            cursor = nested
        cursor[parts[-1]] = _coerce(raw.strip())
    return merged


def load_config(
    path: Path | None = None,
    overrides: Iterable[str] = (),
    *,
    environ: dict[str, str] | None = None,
) -> RunConfig:
    """Load `path` (optional), apply `--set` overrides, then the solver path from the environment."""

    data: dict[str, Any] = {}
    if path is not None:
        try:
            loaded = yaml.safe_load(path.read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as error:
            raise ConfigError(f"cannot read config {path}: {error}") from error
        if loaded is not None and not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must contain a mapping")
        data = loaded or {}
    data = apply_overrides(data, overrides)
    env = os.environ if environ is None else environ
    solver_path = env.get(SOLVER_ENV)
    if solver_path:
        solver = dict(data.get("solver") or {})
        solver["path"] = solver_path
        data["solver"] = solver
    try:
        return RunConfig.model_validate(data)
    except ValidationError as error:
        first = error.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ()))
        raise ConfigError(f"invalid config at {where or '<root>'}: {first.get('msg')}") from error


def dump_config(config: RunConfig) -> str:
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=True)


__all__ = [
    "ConvergenceConfig",
    "EngineConfig",
    "OutputConfig",
    "RunConfig",
    "SOLVER_ENV",
    "SolverConfig",
    "apply_overrides",
    "dump_config",
    "load_config",
]
