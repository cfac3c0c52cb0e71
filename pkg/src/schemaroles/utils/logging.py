# this_file: schemaroles/utils/logging.py
"""Logging setup for applications embedding schemaroles."""

from __future__ import annotations

import sys

from loguru import logger

LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


def configure_logging(level: str = "WARNING", serialize: bool = False) -> None:
    """Route schemaroles logs to standard error and enable the package logger.

    Standard output is never used: it carries the stdio protocol stream
    and the CLI's machine-readable output.

    Args:
        level: Minimum loguru level name
        serialize: Emit one JSON object per record instead of formatted text

    Raises:
        ValueError: If the level name is unknown
    """
    level = level.upper()
    if level not in LOG_LEVELS:
        raise ValueError(f"Unknown log level '{level}'. Available: {list(LOG_LEVELS)}")

    logger.remove()
    logger.add(sys.stderr, level=level, serialize=serialize, backtrace=False, diagnose=False)
    logger.enable("schemaroles")
    logger.debug(f"Logging configured: level={level}, serialize={serialize}")
