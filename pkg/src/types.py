"""
Custom Type Definitions for the Biofilm Electrochemical Signalling Simulator.

This module provides type aliases and enums used for type hinting
throughout the codebase.
"""

from enum import Enum, IntEnum
from typing import Sequence, Union

import numpy as np


# Type aliases for common types
FieldValues = Union[float, np.ndarray]
TimeSeries = Sequence[tuple[float, float]]


class SignalKind(str, Enum):
    """Stimulation waveforms applied at x = 0."""
    CONSTANT_SUPPLY = "constant_supply"
    IMPULSE_TRAIN = "impulse_train"
    PULSE_TRAIN = "pulse_train"


class DeltaMode(str, Enum):
    """How a point source at x = 0 is deposited into node 0."""
    CONCENTRATION = "concentration"
    MASS = "mass"


class StateField(str, Enum):
    """Per-node unknowns of the biofilm model."""
    G_E = "G_e"
    K_E = "K_e"
    G_I = "G_i"
    K_I = "K_i"
    K_AC = "K_ac"
    V = "V"
    N = "n"

    @property
    def unit(self) -> str:
        """Unit label used in plots and reports."""
        if self is StateField.V:
            return "mV"
        if self is StateField.N:
            return "dimensionless"
        return "mM"

    @property
    def is_concentration(self) -> bool:
        return self not in (StateField.V, StateField.N)


class ExitCode(IntEnum):
    """Process exit codes of the command-line entry point."""
    SUCCESS = 0
    VALIDATION = 2
    STABILITY = 3
    IO = 4
