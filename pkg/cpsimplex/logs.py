"""Logger factory shared by the engine and the CLI."""

from __future__ import annotations

import logging
import os

_ROOT = "cp_simplex"


def get_logger(component: str) -> logging.Logger:
    """Return the ``cp_simplex.<component>`` logger, attaching a stderr handler once."""

    logger = logging.getLogger(f"{_ROOT}.{component}")
    if not logger.handlers:
        # Use environment LOG_LEVEL if present, default to INFO.
        log_level = os.getenv("LOG_LEVEL", "INFO").upper()
        logger.setLevel(log_level)
        handler = logging.StreamHandler()
        handler.setLevel(log_level)
        formatter = logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s")
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger
