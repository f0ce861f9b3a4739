"""
Custom Exception Classes for the Biofilm Electrochemical Signalling Simulator.

This module defines a hierarchy of domain-specific exceptions so that the
command-line layer can map failures onto exit codes and users get a message
naming the offending field or simulation time.
"""

from typing import Optional


class BiofilmSimError(Exception):
    """Base exception class for all simulator errors."""

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self) -> str:
        """Return formatted error message."""
        return self.message


class ValidationError(BiofilmSimError):
    """Raised when a configuration value breaks an invariant."""

    def __init__(self, message: str, field: Optional[str] = None, **context):
        if field and not message.startswith(field):
            message = f"{field}: {message}"
        super().__init__(message, field=field, **context)
        self.field = field


class ConfigParseError(BiofilmSimError):
    """Raised when a configuration document is not valid JSON."""
    pass


class UnknownPresetError(ValidationError):
    """Raised when a scenario preset name is not one of the committed presets."""

    def __init__(self, name: str, available: list[str]):
        super().__init__(
            f"unknown preset '{name}' (available: {', '.join(available)})",
            field="scenario",
        )
        self.name = name


class StateCorruptionError(BiofilmSimError):
    """Raised when a model state or derivative breaks a numeric invariant."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        node: Optional[int] = None,
    ):
        super().__init__(message, field=field, node=node)
        self.field = field
        self.node = node


class StabilityError(BiofilmSimError):
    """Raised when the integrated state leaves its admissible range (carries t, field and node)."""

    def __init__(self, message: str, t: Optional[float] = None, **context):
        if t is not None:
            message = f"{message} (at t = {t:.6g} hr)"
        super().__init__(message, t=t, **context)
        self.t = t


class EmptySeriesError(BiofilmSimError):
    """Raised when a metric is asked of a series with no samples."""
    pass


class OutputError(BiofilmSimError):
    """Raised when reading or writing a file fails."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message, path=path)
        self.path = path
