# src/holder_lab/core/config.py
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Runtime settings (12-factor). Override via env vars, e.g.
      HL_OUTPUT_ROOT=/data/reports  HL_BNB_MAX_ITERATIONS=1000000
    """

    # App
    VERSION: str = "0.1.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"
    JSON_LOGS: bool = False

    # Reports and CSV series land here (created on first write)
    OUTPUT_ROOT: Path = Field(default_factory=lambda: Path("./output").resolve())

    # Certified bounds
    DEFAULT_TOL: float = Field(1e-3, gt=0)
    BOUND_SLACK: float = Field(1e-9, ge=0)
    BNB_MAX_ITERATIONS: int = Field(400_000, ge=1)
    BNB_MIN_WIDTH: float = Field(1e-13, gt=0)
    SAMPLE_PAIRS: int = Field(20_000, ge=0)

    # Sign scans use a 2**-SCAN_LEVEL grid
    SCAN_LEVEL: int = Field(20, ge=4, le=26)

    # Construction budgets
    ALMOND_SEGMENT_BUDGET: int = 2 * 3**20
    MATERIALIZE_BUDGET: int = 2 * 3**9
    MAX_CRITICALS: int = 4096

    # Thread pool size; None lets get_worker_count decide
    WORKERS: int | None = None

    model_config = SettingsConfigDict(
        env_prefix="HL_",
        env_file=".env",
        extra="ignore",
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def _upper_level(cls, v: str) -> str:
        return v.upper()

    def output_dir(self) -> Path:
        self.OUTPUT_ROOT.mkdir(parents=True, exist_ok=True)
        return self.OUTPUT_ROOT


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Cached getter; call get_settings.cache_clear() after changing env vars."""
    return Settings()
