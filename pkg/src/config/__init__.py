"""
Configuration Package for the Biofilm Electrochemical Signalling Simulator.

This package provides centralized configuration management including:
- Model parameters and their defaults
- Initial conditions
- Numerical and metric defaults
- Output file names
- Environment lookups
"""

from pathlib import Path

from .settings import (
    Parameters,
    InitialConditions,
    DEFAULT_DX_MM,
    DEFAULT_DT_HR,
    DEFAULT_CFL_SAFETY,
    DEFAULT_RECORD_EVERY_HR,
    DEFAULT_T_END_HR,
    DEFAULT_INITIAL_L,
    SIGNAL_PRESET_INITIAL_L,
    get_sweep_threads,
    validate_configuration,
    APP_NAME,
    APP_VERSION,
)

# Committed scenario presets
PRESET_DIR: Path = Path(__file__).resolve().parent / "presets"

__all__ = [
    "Parameters",
    "InitialConditions",
    "DEFAULT_DX_MM",
    "DEFAULT_DT_HR",
    "DEFAULT_CFL_SAFETY",
    "DEFAULT_RECORD_EVERY_HR",
    "DEFAULT_T_END_HR",
    "DEFAULT_INITIAL_L",
    "SIGNAL_PRESET_INITIAL_L",
    "get_sweep_threads",
    "validate_configuration",
    "APP_NAME",
    "APP_VERSION",
    "PRESET_DIR",
]
