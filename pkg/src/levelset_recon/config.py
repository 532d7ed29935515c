"""Environment and file-based configuration."""

import logging
import os
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Process-wide settings read from the environment."""

    threads: int = Field(default=0, ge=0)
    output_dir: Path = Path("recon_output")
    log_level: str = "INFO"

    @property
    def fft_workers(self) -> int:
        """Worker count for scipy.fft; -1 lets scipy use every core."""
        return -1 if self.threads == 0 else self.threads


def load_settings(env_file: Optional[Union[str, Path]] = None) -> Settings:
    """
    Load settings from the environment, reading a .env file first.

    Args:
        env_file: Optional explicit .env path (defaults to dotenv discovery)

    Returns:
        Validated Settings

    Raises:
        ValueError: If a variable holds an invalid value
    """
    if env_file is not None:
        load_dotenv(env_file)
    else:
        load_dotenv()

    threads_str = os.getenv("RECON_THREADS", "0").strip() or "0"
    try:
        threads = int(threads_str)
    except ValueError:
        raise ValueError(f"RECON_THREADS must be an integer, got '{threads_str}'")
    if threads < 0:
        raise ValueError(f"RECON_THREADS must be >= 0, got {threads}")

    log_level = os.getenv("RECON_LOG_LEVEL", "INFO").strip().upper()
    if log_level not in LOG_LEVELS:
        raise ValueError(f"RECON_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got '{log_level}'")

    output_dir = Path(os.getenv("RECON_OUTPUT_DIR", "recon_output"))
    return Settings(threads=threads, output_dir=output_dir, log_level=log_level)


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the cached process settings."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    """Drop cached settings so the next get_settings() re-reads the environment."""
    global _settings
    _settings = None


def parse_config_file(path: Union[str, Path],
                      allowed: Optional[Iterable[str]] = None) -> Dict[str, str]:
    """
    Parse a flat ``key = value`` configuration file.

    Blank lines and lines starting with ``#`` are skipped. Dashes in keys are
    normalized to underscores so keys may be written like CLI flags.

    Args:
        path: Config file path
        allowed: Accepted keys; anything else is rejected

    Returns:
        Mapping of normalized key to raw string value

    Raises:
        ValueError: On a line without ``=``, an empty key or an unknown key
    """
    values: Dict[str, str] = {}
    allowed_keys = set(allowed) if allowed is not None else None
    with open(path, "r") as f:
        for line_no, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value', got '{line}'")
            key, value = line.split("=", 1)
            key = key.strip().lstrip("-").replace("-", "_")
            if not key:
                raise ValueError(f"{path}:{line_no}: empty key")
            if allowed_keys is not None and key not in allowed_keys:
                raise ValueError(f"{path}:{line_no}: unknown key '{key}'")
            values[key] = value.split("#", 1)[0].strip()
    logger.info(f"Read {len(values)} config entries from {path}")
    return values
