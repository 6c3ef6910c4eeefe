import os
from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from hdc.core import DEFAULT_DIMENSION, DEFAULT_SEED, DEFAULT_WINDOW, parse_seed


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="HDV_",
        env_file=os.getenv("ENV_FILE", ".env"),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    DEBUG: int = 0
    LOG_LEVEL: str = "WARNING"

    # Vector space
    DIMENSION: int = DEFAULT_DIMENSION
    SEED: int = DEFAULT_SEED
    TAU: float | None = None  # None resolves to 4/sqrt(D)

    # Sequence models
    N: int = DEFAULT_WINDOW
    MODEL_PATH: Path = Path("hdv_model.json")

    # Harness
    WORKERS: int = 1

    @field_validator("DEBUG", mode="before")
    @classmethod
    def validate_debug(cls, v: str) -> int:
        if int(v) in [0, 1]:
            return int(v)
        raise ValueError("DEBUG must be 0 or 1")

    @field_validator("SEED", mode="before")
    @classmethod
    def validate_seed(cls, v: str | int) -> int:
        return parse_seed(v)

    @field_validator("DIMENSION")
    @classmethod
    def validate_dimension(cls, v: int) -> int:
        if v < 2:
            raise ValueError("DIMENSION must be at least 2")
        return v

    @field_validator("N")
    @classmethod
    def validate_window(cls, v: int) -> int:
        if v < 2:
            raise ValueError("N must be at least 2")
        return v

    @field_validator("WORKERS")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError("WORKERS must be at least 1")
        return v


settings = Settings()
