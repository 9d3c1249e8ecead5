"""
Runtime settings, read from the environment (and a local .env file).
"""

import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

from .errors import ConfigError

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _int_env(name: str, default: int, minimum: int = 0) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def _bool_env(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigError(f"{name} must be a boolean, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    log_level: str = "WARNING"
    seed: int = 0
    windows: int = 3
    report_indent: int = 2
    crosscheck: bool = True
    round_trips: bool = True

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "Settings":
        """
        Build settings from WMHA_* environment variables.

        Args:
            dotenv_path (Optional[str]): Explicit .env file; the default search
                of python-dotenv is used when omitted.

        Returns:
            Settings: The resolved settings.

        Raises:
            ConfigError: If a variable holds a value of the wrong kind.
        """
        load_dotenv(dotenv_path)
        level = os.getenv("WMHA_LOG_LEVEL", cls.log_level).strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ConfigError(f"WMHA_LOG_LEVEL is not a logging level: {level!r}")
        return cls(
            log_level=level,
            seed=_int_env("WMHA_SEED", cls.seed),
            windows=_int_env("WMHA_WINDOWS", cls.windows),
            report_indent=_int_env("WMHA_REPORT_INDENT", cls.report_indent),
            crosscheck=_bool_env("WMHA_CROSSCHECK", cls.crosscheck),
            round_trips=_bool_env("WMHA_ROUND_TRIPS", cls.round_trips),
        )

    def override(self, **changes) -> "Settings":
        """
        Return a copy with the non-None values of `changes` applied.

        Raises:
            ConfigError: If a count (seed, windows, report indent) is negative.
        """
        applied = {k: v for k, v in changes.items() if v is not None}
        for name in ("seed", "windows", "report_indent"):
            if applied.get(name, 0) < 0:
                raise ConfigError(f"{name} must be >= 0, got {applied[name]}")
        return replace(self, **applied)
