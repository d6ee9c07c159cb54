"""
Configuration settings for the regen-stable laboratory.
"""
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings loaded from REGEN_STABLE_* environment variables (and .env)."""

    model_config = SettingsConfigDict(
        env_prefix="REGEN_STABLE_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",  # Ignore unrelated entries in .env
    )

    # Application Settings
    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "results"
    DEFAULT_SEED: int = 20240917

    # Parallelism (fallback for --threads)
    THREADS: int = 1

    # Numerical knobs
    INTEGRATION_BUDGET: int = 1_000_000
    INTEGRATION_REL_TARGET: float = 0.005
    COVERING_Z_CAP_FACTOR: float = 10.0
    ML_STEPS_PER_UNIT: int = 10_000
    RENEWAL_FFT_THRESHOLD: int = 10_000

    # Optional override of the default config file used by the CLI
    CONFIG_PATH: Optional[str] = None


settings = Settings()
