import logging
from enum import Enum
from functools import lru_cache
from typing import Optional

from pydantic import Field, model_validator, ValidationError
from pydantic_settings import BaseSettings


class LogLevel(str, Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"

    def __str__(self):
        return self.value


class Settings(BaseSettings):
    # Output
    OUTPUT_DIR: Optional[str] = Field(None, validation_alias="ROTASYM_OUT")
    RENDER_SIZE: int = Field(128, gt=0, validation_alias="RENDER_SIZE")

    # Logger
    LOG_LEVEL: LogLevel = Field(LogLevel.INFO, validation_alias="LOG_LEVEL")

    # Solver
    BLOWUP_GUARD: float = Field(1e6, gt=0, validation_alias="BLOWUP_GUARD")
    LINEAR_TOL: float = Field(1e-10, gt=0, validation_alias="LINEAR_TOL")
    MAX_LINEAR_ITERATIONS: int = Field(20000, gt=0, validation_alias="MAX_LINEAR_ITERATIONS")

    # Symmetry / omega
    SCENARIO_TOL: float = Field(1e-3, gt=0, validation_alias="SCENARIO_TOL")
    IDENTITY_TOL_FACTOR: float = Field(1e-8, gt=0, validation_alias="IDENTITY_TOL_FACTOR")
    WINDOW_FRACTION: float = Field(0.2, gt=0, le=1, validation_alias="WINDOW_FRACTION")
    MIN_WINDOW_SNAPSHOTS: int = Field(5, ge=2, validation_alias="MIN_WINDOW_SNAPSHOTS")

    @model_validator(mode='after')
    def config_output_dir(self) -> 'Settings':
        if self.OUTPUT_DIR is not None and not self.OUTPUT_DIR.strip():
            self.OUTPUT_DIR = None
        return self

    class Config:
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"


@lru_cache()
def get_settings() -> Settings:
    try:
        return Settings()
    except ValidationError as e:
        logging.critical(f"Failed to load rotasym settings from environment: {e}")
        raise

settings = get_settings()
