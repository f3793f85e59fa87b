"""Runtime settings read from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache


class ConfigurationError(RuntimeError):
    """Raised when an environment setting cannot be parsed."""


@dataclass(frozen=True)
class Settings:
    max_iterations: int = 10000
    threads: int = 1
    partition_limit: int = 50000
    ray_limit: int = 200000
    bisection_limit: int = 256
    verify_vertices: bool = False


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _int_setting(name: str, default: int, *, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}") from exc
    if value < minimum:
        raise ConfigurationError(f"{name} must be at least {minimum}, got {value}")
    return value


def _bool_setting(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigurationError(f"{name} must be a boolean flag, got {raw!r}")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        max_iterations=_int_setting("CPSIMPLEX_MAX_ITER", Settings.max_iterations),
        threads=_int_setting("CPSIMPLEX_THREADS", Settings.threads),
        partition_limit=_int_setting("CPSIMPLEX_PARTITION_LIMIT", Settings.partition_limit),
        ray_limit=_int_setting("CPSIMPLEX_RAY_LIMIT", Settings.ray_limit),
        bisection_limit=_int_setting("CPSIMPLEX_BISECTION_LIMIT", Settings.bisection_limit),
        verify_vertices=_bool_setting("CPSIMPLEX_VERIFY_VERTICES", Settings.verify_vertices),
    )


def clear_cached_settings() -> None:
    """Forget the cached settings (used in tests)."""

    get_settings.cache_clear()  # type: ignore[attr-defined]
