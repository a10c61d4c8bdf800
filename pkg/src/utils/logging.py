"""Centralized logging configuration."""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {process} | {level: <8} | {name}:{function}:{line} - {message}"


def error_log_path(log_file: str) -> Path:
    """Path of the error-only log kept beside ``log_file``."""
    path = Path(log_file)
    return path.with_name(f"{path.stem}_errors{path.suffix or '.log'}")


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    rotation: str = "100 MB",
    retention: str = "30 days",
    enable_console: bool = True,
):
    """Configure logging for a benchmark run.

    Console output goes to stderr so that stdout stays free for data.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Optional path of the main log file
        rotation: When to rotate log files
        retention: How long to keep old log files
        enable_console: Whether to log to stderr
    """
    logger.remove()

    if enable_console:
        logger.add(sys.stderr, format=CONSOLE_FORMAT, level=log_level, colorize=True)

    if not log_file:
        return

    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    for path, level in ((log_path, log_level), (error_log_path(log_file), "ERROR")):
        logger.add(
            path,
            format=FILE_FORMAT,
            level=level,
            rotation=rotation,
            retention=retention,
        )

    logger.debug(f"Log file: {log_path.absolute()}")
