"""Handles retrieval of runtime settings from the environment (.env is loaded by app.py)."""

import os
import logging
from typing import Callable, Dict, Optional, TypeVar

from utils.errors import SettingsException

T = TypeVar("T")

# Simple in-memory cache to store settings during the process lifecycle
_cache: Dict[str, object] = {}

MAX_SEED = (1 << 64) - 1


def get_setting(name: str, cast: Callable[[str], T], default: Optional[T] = None) -> Optional[T]:
    """
    Retrieves a setting from the environment with in-memory caching.

    Args:
        name: The environment variable name.
        cast: Converter applied to the raw string.
        default: Value used when the variable is unset or empty.

    Returns:
        The converted value, or `default`.

    Raises:
        SettingsException: If the raw value cannot be converted.
    """
    if name in _cache:
        return _cache[name]

    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        value = default
    else:
        try:
            value = cast(raw.strip())
        except ValueError:
            logging.error(f"Could not parse setting {name}={raw!r}")
            raise SettingsException(name, raw)
        logging.debug(f"Loaded setting {name}={value}")

    _cache[name] = value
    return value


def clear_cache() -> None:
    """Forgets every cached value so the next lookup reads the environment again."""
    _cache.clear()


# --- Typed accessors ---

def _seed(raw: str) -> int:
    value = int(raw, 0)
    if not 0 <= value <= MAX_SEED:
        raise ValueError(raw)
    return value


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise ValueError(raw)
    return value


def _positive_float(raw: str) -> float:
    value = float(raw)
    if not value > 0:
        raise ValueError(raw)
    return value


def seed_override() -> Optional[int]:
    return get_setting("FRAMEPATH_SEED", _seed)


def max_level() -> int:
    return get_setting("FRAMEPATH_MAX_LEVEL", int, 24)


def max_pvar_points() -> int:
    return get_setting("FRAMEPATH_MAX_PVAR_POINTS", _positive_int, (1 << 13) + 1)


def max_surface_entries() -> int:
    return get_setting("FRAMEPATH_MAX_SURFACE_ENTRIES", _positive_int, 1 << 20)


def series_tol() -> float:
    return get_setting("FRAMEPATH_SERIES_TOL", _positive_float, 1e-10)


def default_threads() -> int:
    return get_setting("FRAMEPATH_THREADS", _positive_int, 1)


def log_level() -> str:
    return get_setting("FRAMEPATH_LOG_LEVEL", str.upper, "INFO")
