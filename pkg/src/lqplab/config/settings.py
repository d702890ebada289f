"""
Centralized process settings.

Experiments are configured by their JSON files; the environment only
overrides where reports are written, the default log level and the
deployment environment.
"""

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings

ALLOWED_ENVIRONMENTS = {"development", "test", "production"}
ALLOWED_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


class Settings(BaseSettings):
    """Application settings with environment variable fallbacks."""

    OUTPUT_DIR: Path = Field(
        Path("results"),
        description="Directory receiving JSON reports and CSV ladders",
    )
    ENV: str = Field(
        default="development",
        description="Environment (development, test, production)",
    )
    LOG_LEVEL: str = Field(
        "INFO", description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)"
    )

    @field_validator("OUTPUT_DIR", mode="before")
    @classmethod
    def validate_output_dir(cls, v):
        """Reject empty paths and expand the user directory."""
        if v is None or str(v).strip() == "":
            raise ValueError("LQPLAB_OUTPUT_DIR must not be empty")
        return Path(v).expanduser()

    @field_validator("ENV")
    @classmethod
    def validate_environment(cls, v):
        """Ensure environment is one of the allowed values."""
        if v not in ALLOWED_ENVIRONMENTS:
            raise ValueError(
                f"LQPLAB_ENV must be one of {sorted(ALLOWED_ENVIRONMENTS)}"
            )
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        level = str(v).upper()
        if level not in ALLOWED_LOG_LEVELS:
            raise ValueError(
                f"LQPLAB_LOG_LEVEL must be one of {sorted(ALLOWED_LOG_LEVELS)}"
            )
        return level

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": True,
        "extra": "ignore",
        "env_prefix": "LQPLAB_",
    }


# Settings instance will load values from .env and environment variables
settings = Settings()  # type: ignore

__all__ = ["ALLOWED_ENVIRONMENTS", "ALLOWED_LOG_LEVELS", "Settings", "settings"]
