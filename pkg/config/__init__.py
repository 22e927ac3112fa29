"""Application settings for the CLI and the service.

The mode comes from ``POLCA_MODE`` (then ``MODE``, then ``APP_ENV``) and
picks one of the per-mode settings classes, each reading its own
``env/.env.<mode>`` file. ``RUN_CONFIG`` names the TOML run configuration
used when no ``--config`` flag is given.
"""
from __future__ import annotations

import os

from pydantic_settings import BaseSettings

from .local import LocalSettings
from .prod import ProdSettings
from .test import TestSettings

MODE = (os.environ.get("POLCA_MODE") or os.environ.get("MODE") or os.environ.get("APP_ENV") or "local").lower()

_MAPPING: dict[str, type[BaseSettings]] = {
    "local": LocalSettings,
    "dev": LocalSettings,
    "test": TestSettings,
    "stage": ProdSettings,
    "staging": ProdSettings,
    "prod": ProdSettings,
    "production": ProdSettings,
}


def settings_for(mode: str) -> BaseSettings:
    """Settings of ``mode``; unknown modes get the local settings."""
    return _MAPPING.get(mode.lower(), LocalSettings)()


settings = settings_for(MODE)

__all__ = ["MODE", "settings", "settings_for"]
