"""
Runtime configuration
Values come from TWIC_* environment variables (a .env file is honoured by the CLI)
"""

import logging
import os
from typing import Optional

from pydantic import BaseModel, Field, field_validator


class LabConfig(BaseModel):
    """Settings shared by the CLI, the simulator and the sweep driver"""

    seed: int = 0
    log_level: str = "WARNING"
    default_L: int = Field(default=32, ge=1)
    default_blocks: int = Field(default=10, ge=1)
    base_n: int = Field(default=12, ge=1)
    workers: int = Field(default_factory=lambda: max(1, os.cpu_count() or 1), ge=1)
    trace_slots: int = Field(default=64, ge=0)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level {value!r}")
        return level

    @classmethod
    def from_env(cls, environ: Optional[dict] = None) -> "LabConfig":
        env = os.environ if environ is None else environ
        values = {}
        for field, key in (
            ("seed", "TWIC_SEED"),
            ("log_level", "TWIC_LOG_LEVEL"),
            ("default_L", "TWIC_L"),
            ("default_blocks", "TWIC_BLOCKS"),
            ("base_n", "TWIC_BASE_N"),
            ("workers", "TWIC_WORKERS"),
        ):
            raw = env.get(key)
            if raw not in (None, ""):
                values[field] = raw
        return cls(**values)

    def configure_logging(self, verbose: bool = False) -> None:
        level = logging.INFO if verbose else getattr(logging, self.log_level)
        logging.basicConfig(
            level=level,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
