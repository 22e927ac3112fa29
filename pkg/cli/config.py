# cli/config.py
"""Run configuration: TOML file, ``POLCA_`` environment variables and CLI flags.

Precedence is flags, then environment, then file, then defaults. Nested
sections map to ``[search]``, ``[search.priority]``, ``[env]``,
``[endpoint]``, ``[embedding]`` and ``[theory]``; environment variables
use ``__`` between levels (``POLCA_SEARCH__BATCH_SIZE=4``).
"""
import tomllib
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Literal

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource

from config import settings
from engine.models import SearchConfig
from llm.models import LlmEndpointConfig
from oracles.models import SyntheticEnvConfig
from theory.models import TheoryConfig
from .errors import ConfigError


class RunSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="POLCA_", env_nested_delimiter="__", extra="forbid")

    oracle: Literal["synthetic", "llm"] = "synthetic"
    search: SearchConfig = Field(default_factory=SearchConfig)
    env: SyntheticEnvConfig = Field(default_factory=SyntheticEnvConfig)
    endpoint: LlmEndpointConfig = Field(default_factory=lambda: settings.CHAT_ENDPOINT)
    embedding: LlmEndpointConfig = Field(default_factory=lambda: settings.EMBEDDING_ENDPOINT)
    theory: TheoryConfig = Field(default_factory=TheoryConfig)
    dataset: Path | None = None
    dataset_size: int = Field(10, ge=1)
    seed_payload: str = "Answer the question. Reply with the answer only."
    initial_true_mean: float = Field(0.0, ge=0.0)
    output_dir: Path = Field(default_factory=lambda: settings.OUTPUT_DIR)

    @classmethod
    def settings_customise_sources(cls, settings_cls, init_settings, env_settings, dotenv_settings, file_secret_settings):
        return (init_settings, env_settings, TomlConfigSettingsSource(settings_cls))


def _describe(exc: ValidationError) -> str:
    unknown = []
    invalid = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<root>"
        if error["type"] == "extra_forbidden":
            unknown.append(location)
        else:
            invalid.append(f"{location}: {error['msg']}")
    parts = []
    if unknown:
        parts.append("unknown configuration keys: " + ", ".join(unknown))
    if invalid:
        parts.append("invalid configuration values: " + "; ".join(invalid))
    return ". ".join(parts)


def load_config(path: Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunSettings:
    """Build the effective run configuration.

    Without ``path`` the file named by the ``RUN_CONFIG`` setting is used, if any.
    """
    if path is None:
        path = settings.RUN_CONFIG
    settings_cls = RunSettings
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")

        class FileRunSettings(RunSettings):
            model_config = SettingsConfigDict(**{**RunSettings.model_config, "toml_file": path})

        settings_cls = FileRunSettings

    try:
        return settings_cls(**dict(overrides or {}))
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc


def effective_config(run_settings: RunSettings) -> dict[str, Any]:
    return run_settings.model_dump(mode="json")
