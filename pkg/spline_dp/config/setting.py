import os
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    # App
    APP_NAME: str = os.environ.get("APP_NAME", "spline-dp")
    DEBUG: bool = bool(os.environ.get("DEBUG", False))

    # LOGGER_CONFIGURATION
    LOGGER_NAME: str = os.environ.get("LOGGER_NAME", "spline_dp")
    LOG_FILE: str | None = os.environ.get("LOG_FILE")
    LOG_LEVEL: str = os.environ.get("LOG_LEVEL", "INFO")
    LOG_MAX_BYTES: int = int(os.environ.get("LOG_MAX_BYTES", 10**6))
    LOG_BACKUP_COUNT: int = int(os.environ.get("LOG_BACKUP_COUNT", 5))

    # OUTPUT_CONFIGURATION
    OUTPUT_DIR: str = os.environ.get("SDP_OUTPUT_DIR", "runs")


@lru_cache()
def get_settings() -> Settings:
    return Settings()
