"""Application configuration."""
from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings.

    Only the cache directory and logging verbosity come from the environment;
    numeric defaults live in ``app.core.constants`` so results never depend on
    the shell a run was started from.
    """

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    PROJECT_NAME: str = "subagging-cv"

    # Ensembles written by `subag-train` without --output land here
    SUBAG_CACHE_DIR: Path = Path(".subag_cache")

    # Logging only
    SUBAG_DEBUG: bool = False

    @field_validator("SUBAG_CACHE_DIR", mode="before")
    @classmethod
    def parse_cache_dir(cls, v):
        """Expand ``~`` in the configured cache directory."""
        if isinstance(v, str):
            return Path(v.strip()).expanduser()
        return v


settings = Settings()
