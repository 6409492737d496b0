"""Application configuration helpers."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_PROJECT_ROOT = Path(__file__).resolve().parents[1]
load_dotenv(_PROJECT_ROOT / ".env")


class Settings(BaseSettings):
    """Central configuration loaded from the environment or `.env`."""

    data_dir: Path = Field(
        default=Path("data"),
        validation_alias="ZMOD_DATA_DIR",
        description="Cache directory for downloaded datasets.",
    )
    presets_file: Optional[Path] = Field(
        default=None,
        validation_alias="ZMOD_PRESETS_FILE",
        description="Annealing presets JSON. None = bundled presets.json.",
    )
    default_preset: str = Field(
        default="default",
        validation_alias="ZMOD_DEFAULT_PRESET",
        description="Preset used when the CLI gets no --preset.",
    )
    log_level: str = Field(default="INFO", validation_alias="ZMOD_LOG_LEVEL")
    jobs: int = Field(
        default=1,
        ge=1,
        validation_alias="ZMOD_JOBS",
        description="Worker processes for restarts and sweeps.",
    )
    exhaustive_composition_limit: int = Field(
        default=12,
        ge=2,
        validation_alias="ZMOD_EXHAUSTIVE_LIMIT",
        description="Largest q whose groupings are enumerated exhaustively.",
    )
    http_timeout: float = Field(
        default=30.0,
        gt=0,
        validation_alias="ZMOD_HTTP_TIMEOUT",
        description="Seconds before a dataset download is abandoned.",
    )

    @field_validator("presets_file", mode="before")
    @classmethod
    def _empty_str_to_none(cls, v: object) -> Optional[object]:
        """Convert empty string to None for the optional path."""
        return None if v == "" else v

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, v: str) -> str:
        return v.upper()

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


@lru_cache(1)
def get_settings() -> Settings:
    return Settings()  # type: ignore[arg-type]
