import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from ..models.errors import InvalidConfig

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    """Runtime settings read from the environment (and an optional .env file)"""
    seed: int = 42
    tolerance: float = 1e-9
    log_level: str = "WARNING"
    db_path: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.tolerance < 0:
            raise InvalidConfig(f"SUBBARY_TOLERANCE must be non-negative, got {self.tolerance}")
        if self.log_level not in LOG_LEVELS:
            raise InvalidConfig(f"SUBBARY_LOG_LEVEL must be one of {LOG_LEVELS}, got {self.log_level!r}")
        if self.workers < 1:
            raise InvalidConfig(f"SUBBARY_WORKERS must be at least 1, got {self.workers}")

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "Settings":
        load_dotenv(dotenv_path)
        try:
            return cls(
                seed=int(os.getenv("SUBBARY_SEED", "42")),
                tolerance=float(os.getenv("SUBBARY_TOLERANCE", "1e-9")),
                log_level=os.getenv("SUBBARY_LOG_LEVEL", "WARNING").upper(),
                db_path=os.getenv("SUBBARY_DB_PATH") or None,
                workers=int(os.getenv("SUBBARY_WORKERS", "1")),
            )
        except ValueError as e:
            logger.error(f"Error reading settings: {str(e)}")
            raise InvalidConfig(f"malformed SUBBARY_* setting: {e}")
