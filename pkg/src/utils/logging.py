"""
Structured Logging Module for the Biofilm Electrochemical Signalling Simulator.

This module provides a centralized logging configuration. Context passed
with ``extra={...}`` is appended to console lines as ``key=value`` pairs and
merged into JSON lines as top-level keys.
"""

import json
import logging
import os
import sys
from typing import Any, Optional


# Attributes every LogRecord carries; anything else came in through ``extra``
_RECORD_ATTRIBUTES = frozenset(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


def record_context(record: logging.LogRecord) -> dict[str, Any]:
    """The ``extra`` fields attached to a record."""
    return {key: value for key, value in vars(record).items() if key not in _RECORD_ATTRIBUTES}


class ColorizingFormatter(logging.Formatter):
    """Formatter with color support for terminal output."""

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",   # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",   # Red
        "CRITICAL": "\033[35m",  # Magenta
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        """Add the record context and, on a terminal, color."""
        message = super().format(record)
        context = record_context(record)
        if context:
            message += " | " + " ".join(f"{key}={value}" for key, value in context.items())
        if not sys.stderr.isatty():
            return message

        color = self.COLORS.get(record.levelname, self.RESET)
        return f"{color}{message}{self.RESET}"


class JsonFormatter(logging.Formatter):
    """One JSON object per line: time, level, name, message and the record context."""

    def __init__(self):
        super().__init__(datefmt="%Y-%m-%dT%H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "time": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "name": record.name,
            "message": record.getMessage(),
            **record_context(record),
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


def default_level() -> int:
    """Log level from BIOFILM_ECOM_LOG_LEVEL, INFO when unset or unknown."""
    name = os.getenv("BIOFILM_ECOM_LOG_LEVEL", "INFO").upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def json_requested() -> bool:
    return os.getenv("BIOFILM_ECOM_LOG_JSON", "0").lower() in ("1", "true", "yes")


def setup_logger(
    name: str,
    level: Optional[int] = None,
    use_json: Optional[bool] = None,
) -> logging.Logger:
    """
    Configure and return a logger instance.

    Module loggers propagate to the root logger once ``configure_app_logging``
    has installed handlers there; until then they carry their own stderr
    handler so library use still produces output.

    Args:
        name: Logger name
        level: Minimum log level (defaults to BIOFILM_ECOM_LOG_LEVEL)
        use_json: Whether to output JSON format (defaults to BIOFILM_ECOM_LOG_JSON)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    logger.setLevel(default_level() if level is None else level)
    if use_json is None:
        use_json = json_requested()

    console_handler = logging.StreamHandler(sys.stderr)

    if use_json:
        console_handler.setFormatter(JsonFormatter())
    else:
        fmt = "%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(message)s"
        datefmt = "%Y-%m-%d %H:%M:%S"
        console_handler.setFormatter(ColorizingFormatter(fmt=fmt, datefmt=datefmt))

    logger.addHandler(console_handler)
    logger.propagate = False

    return logger


def configure_app_logging(
    level: Optional[int] = None,
    log_file: Optional[str] = None,
    use_json: Optional[bool] = None,
) -> None:
    """Configure root logger for the command-line application."""
    # Suppress noisy third-party loggers
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("joblib").setLevel(logging.WARNING)

    if level is None:
        level = default_level()
    if use_json is None:
        use_json = json_requested()

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)

    if use_json:
        console_handler.setFormatter(JsonFormatter())
    else:
        fmt = "%(asctime)s | %(levelname)-8s | %(message)s"
        datefmt = "%Y-%m-%d %H:%M:%S"
        console_handler.setFormatter(ColorizingFormatter(fmt=fmt, datefmt=datefmt))

    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(JsonFormatter())
        root_logger.addHandler(file_handler)

    # Hand module loggers over to the root handlers
    for name in list(logging.root.manager.loggerDict):
        existing = logging.getLogger(name)
        if existing.handlers and not existing.propagate:
            existing.handlers.clear()
            existing.propagate = True
            existing.setLevel(level)


# Convenience loggers
_integrator_logger = None


def get_integrator_logger() -> logging.Logger:
    """Get logger for the time-integration loop."""
    global _integrator_logger
    if _integrator_logger is None:
        _integrator_logger = setup_logger("integrator")
    return _integrator_logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger with the given name.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Configured logger instance
    """
    return setup_logger(name)
