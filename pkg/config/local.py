from __future__ import annotations

from pathlib import Path
from pydantic_settings import BaseSettings
from pydantic_settings import SettingsConfigDict
from config.endpoints import build_endpoint

ROOT = Path(__file__).resolve().parents[1]
ENV_FILE = ROOT / "env" / ".env.local"


class LocalSettings(BaseSettings):
    APP_ENV: str = "local"
    DEBUG: bool = True
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: Path = ROOT / "runs"
    # TOML run configuration used when the CLI gets no --config flag
    RUN_CONFIG: Path | None = None

    # Hosted model endpoints (llm oracle only)
    LLM_BASE_URL: str = "https://api.openai.com/v1"
    LLM_MODEL: str = "gpt-4o-mini"
    EMBEDDING_MODEL: str = "text-embedding-3-small"
    LLM_API_KEY_ENV: str = "OPENAI_API_KEY"

    CORS_ORIGINS: list[str] = ["http://localhost:3000"]

    model_config = SettingsConfigDict(
        env_file=str(ENV_FILE) if ENV_FILE.exists() else None,
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @property
    def CHAT_ENDPOINT(self):
        """Default chat endpoint built from the LLM_* settings"""
        return build_endpoint(self.LLM_BASE_URL, self.LLM_MODEL, self.LLM_API_KEY_ENV)

    @property
    def EMBEDDING_ENDPOINT(self):
        """Default embedding endpoint; shares base URL and key with chat"""
        return build_endpoint(self.LLM_BASE_URL, self.EMBEDDING_MODEL, self.LLM_API_KEY_ENV)
