"""Logging helpers shared by the simulator modules."""

from .logging import (
    ColorizingFormatter,
    JsonFormatter,
    configure_app_logging,
    get_integrator_logger,
    get_logger,
    setup_logger,
)

__all__ = [
    "ColorizingFormatter",
    "JsonFormatter",
    "configure_app_logging",
    "get_integrator_logger",
    "get_logger",
    "setup_logger",
]
