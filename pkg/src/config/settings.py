"""
Configuration management for gesturebench.

Loads and validates a JSON config file with sections `model`, `train`,
`stream` and `bench`, then layers environment overrides on top (from .env and
real env vars). Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.bench.report import BenchConfig
from src.config.paths import config_file
from src.core.errors import ConfigurationError
from src.core.fileio import atomic_write_text
from src.models import ModelConfig, ModelFamily, parse_model_config
from src.stream.pipeline import StreamConfig
from src.training.config import TrainConfig

logger = logging.getLogger(__name__)

SEED_ENV = "GESTUREBENCH_SEED"


# ---------------------------------------------------------------------------
# .env loading
# ---------------------------------------------------------------------------

def load_env() -> None:
    """Load the nearest .env into os.environ without overriding real env vars."""
    path = find_dotenv(usecwd=True)
    if path:
        load_dotenv(path, override=False)
        logger.debug("loaded environment from %s", path)


# ---------------------------------------------------------------------------
# Pydantic models
# ---------------------------------------------------------------------------

class ModelSection(BaseModel):
    """`family` plus the flat fields of that family's config class."""
    model_config = ConfigDict(extra="allow")

    family: ModelFamily = ModelFamily.LSTM

    @model_validator(mode="after")
    def _fields_match_family(self) -> ModelSection:
        try:
            parse_model_config(self.family, self.model_extra)
        except ValidationError as exc:
            raise ValueError(f"{self.family.value} config: {_describe(exc)}") from exc
        return self

    @property
    def family_fields(self) -> dict[str, Any]:
        return dict(self.model_extra or {})

    def build_config(self, family: ModelFamily | str | None = None, **overrides: Any) -> ModelConfig:
        """
        Config for `family` (default: this section's). Fields from this section
        only apply when the family matches; overrides fill fields left unset.
        """
        family = ModelFamily(family or self.family)
        data = self.family_fields if family is self.family else {}
        for key, value in overrides.items():
            data.setdefault(key, value)
        return parse_model_config(family, data)


class Settings(BaseModel):
    """Root configuration model."""
    model_config = ConfigDict(extra="forbid")

    model: ModelSection = Field(default_factory=ModelSection)
    train: TrainConfig = Field(default_factory=TrainConfig)
    stream: StreamConfig = Field(default_factory=StreamConfig)
    bench: BenchConfig = Field(default_factory=BenchConfig)


# ---------------------------------------------------------------------------
# Env overrides
# ---------------------------------------------------------------------------

def _apply_env_overrides(settings: Settings) -> Settings:
    """env wins over the config file."""
    if v := os.environ.get(SEED_ENV):
        try:
            settings.train.seed = int(v)
        except ValueError as exc:
            raise ConfigurationError(f"{SEED_ENV} must be an integer, got {v!r}") from exc
    return settings


# ---------------------------------------------------------------------------
# Loader
# ---------------------------------------------------------------------------

def load_settings(config_path: Path | None = None) -> Settings:
    """
    Load settings from a JSON file, falling back to ~/.gesturebench/config.json
    and then to defaults. An explicitly named file must exist.
    """
    load_env()
    path = config_path or config_file()
    if path.exists():
        try:
            raw: dict[str, Any] = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        try:
            settings = Settings.model_validate(raw)
        except ValidationError as exc:
            raise ConfigurationError(f"{path}: {_describe(exc)}") from exc
        logger.debug("loaded settings from %s", path)
    elif config_path is not None:
        raise ConfigurationError(f"config file not found: {path}")
    else:
        settings = Settings()
    return _apply_env_overrides(settings)


def _describe(exc: ValidationError) -> str:
    """One line per problem, naming the offending key."""
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def save_settings(settings: Settings, config_path: Path | None = None) -> Path:
    path = config_path or config_file()
    data = settings.model_dump(mode="json")
    return atomic_write_text(path, json.dumps(data, indent=2) + "\n")
