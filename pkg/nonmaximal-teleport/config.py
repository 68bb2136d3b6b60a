"""
Configuration settings for the teleportation simulator.
"""
import json
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from exceptions import ConfigError

load_dotenv()


class Config:
    """Application configuration."""

    # Numerical tolerances
    STRUCTURAL_TOLERANCE: float = float(os.getenv("TELEPORT_TOLERANCE", "1e-10"))
    ROUNDTRIP_TOLERANCE: float = float(os.getenv("TELEPORT_ROUNDTRIP_TOLERANCE", "1e-12"))
    RECOVERY_TOLERANCE: float = float(os.getenv("TELEPORT_RECOVERY_TOLERANCE", "1e-9"))
    RANK_CUTOFF: float = float(os.getenv("TELEPORT_RANK_CUTOFF", "1e-10"))

    # Eigenvalues in [-NEGATIVE_FLOOR, 0) are treated as roundoff
    NEGATIVE_FLOOR: float = 1e-12

    # Dense tripartite oracle limits
    ORACLE_MAX_DIM: int = int(os.getenv("TELEPORT_ORACLE_MAX_DIM", "4"))
    TRIPARTITE_MAX_DIM: int = 8

    # Reporting
    REPORT_DIGITS: int = int(os.getenv("TELEPORT_REPORT_DIGITS", "12"))

    # Logging
    LOG_LEVEL: str = os.getenv("TELEPORT_LOG_LEVEL", "INFO")
    LOG_FILE: str = os.getenv("TELEPORT_LOG_FILE", "")

    @classmethod
    def validate(cls) -> bool:
        """Validate that the numeric settings are usable."""
        for name in ("STRUCTURAL_TOLERANCE", "ROUNDTRIP_TOLERANCE", "RECOVERY_TOLERANCE", "RANK_CUTOFF"):
            if not getattr(cls, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 1 <= cls.REPORT_DIGITS <= 17:
            raise ValueError("REPORT_DIGITS must lie in [1, 17]")
        if cls.ORACLE_MAX_DIM > cls.TRIPARTITE_MAX_DIM:
            raise ValueError(f"ORACLE_MAX_DIM cannot exceed {cls.TRIPARTITE_MAX_DIM}")
        return True


def parse_config(text: str, source: Optional[str] = None):
    """
    Parse and validate an experiment document.

    Args:
        text: JSON document
        source: Optional file name used in error messages

    Returns:
        Validated ExperimentConfig with defaults applied

    Raises:
        ConfigError: on malformed JSON or any validation failure
    """
    # models imports Config for its defaults
    from models import ExperimentConfig

    where = f" in {source}" if source else ""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Malformed JSON{where}: {e}") from e

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config{where}: {e}") from e
