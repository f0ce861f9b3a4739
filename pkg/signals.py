"""
Stimulation Inputs for the Biofilm Electrochemical Signalling Simulator.

Inputs act at the biofilm interior (x = 0): a continuous glutamate supply,
potassium impulse trains (instantaneous concentration jumps) and rectangular
potassium pulse trains (rate windows of width W repeated every T_p).
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from grid import Grid
from src.types import DeltaMode, SignalKind


class InputSignal(BaseModel):
    """
    Stimulation waveform applied at x = 0.

    Attributes:
        kind: Waveform type
        rate: Source rate (mM/hr) for constant_supply and pulse_train
        impulse_magnitude: Concentration jump per impulse (mM)
        event_times: Impulse times (hr), strictly increasing
        start: First pulse start (hr)
        width: Pulse width W (hr)
        period: Pulse period T_p (hr)
        count: Number of pulses
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: SignalKind = SignalKind.CONSTANT_SUPPLY
    rate: float = Field(0.0, ge=0)
    impulse_magnitude: float = Field(0.0, ge=0)
    event_times: tuple[float, ...] = ()
    start: float = Field(0.0, ge=0)
    width: Optional[float] = None
    period: Optional[float] = None
    count: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_waveform(self) -> "InputSignal":
        if any(t < 0 for t in self.event_times):
            raise ValueError("event_times must be non-negative")
        if any(b <= a for a, b in zip(self.event_times, self.event_times[1:])):
            raise ValueError("event_times must be strictly increasing")
        if self.kind is SignalKind.PULSE_TRAIN:
            if self.width is None or not self.width > 0:
                raise ValueError("pulse_train needs width > 0")
            if self.period is None or self.period < self.width:
                raise ValueError("pulse_train needs period >= width")
        return self

    @classmethod
    def none(cls) -> "InputSignal":
        """A signal that never injects anything."""
        return cls(kind=SignalKind.CONSTANT_SUPPLY, rate=0.0)

    def pulse_starts(self) -> list[float]:
        if self.kind is not SignalKind.PULSE_TRAIN:
            return []
        return [self.start + k * self.period for k in range(self.count)]

    def stimulus_times(self) -> list[float]:
        """Onset time of every discrete stimulus (impulses or pulses)."""
        if self.kind is SignalKind.IMPULSE_TRAIN:
            return list(self.event_times) if self.impulse_magnitude > 0 else []
        if self.kind is SignalKind.PULSE_TRAIN:
            return self.pulse_starts() if self.rate > 0 else []
        return []

    def breakpoints(self, t_end: float) -> list[float]:
        """Times in (0, t_end) where the forcing is discontinuous."""
        if self.kind is SignalKind.IMPULSE_TRAIN:
            times = list(self.event_times)
        elif self.kind is SignalKind.PULSE_TRAIN:
            times = [edge for t0 in self.pulse_starts() for edge in (t0, t0 + self.width)]
        else:
            times = []
        return sorted(t for t in set(times) if 0 < t < t_end)


def continuous_rate(sig: InputSignal, t: float) -> float:
    """
    Source rate at x = 0 at time t (mM/hr).

    Pulse windows are half-open, [t_k, t_k + W); impulse trains carry no rate.
    """
    if sig.kind is SignalKind.CONSTANT_SUPPLY:
        return sig.rate
    if sig.kind is SignalKind.IMPULSE_TRAIN or sig.count == 0 or t < sig.start:
        return 0.0

    k = int(math.floor((t - sig.start) / sig.period))
    if k >= sig.count:
        return 0.0
    offset = t - (sig.start + k * sig.period)
    return sig.rate if 0 <= offset < sig.width else 0.0


def pending_impulses(sig: InputSignal, t0: float, t1: float) -> list[tuple[float, float]]:
    """Impulses (time, magnitude) with t0 < time <= t1."""
    if sig.kind is not SignalKind.IMPULSE_TRAIN:
        return []
    return [(t, sig.impulse_magnitude) for t in sig.event_times if t0 < t <= t1]


def delta_contribution(n_nodes: int, dx: float, amount: float, mode: DeltaMode = DeltaMode.CONCENTRATION) -> np.ndarray:
    """Per-node contribution of a point source at x = 0; only node 0 is non-zero."""
    contribution = np.zeros(n_nodes)
    contribution[0] = amount if mode is DeltaMode.CONCENTRATION else amount / dx
    return contribution


def apply_delta_source(
    field: np.ndarray,
    g: Grid,
    amount_or_rate: float,
    mode: DeltaMode = DeltaMode.CONCENTRATION,
) -> np.ndarray:
    """
    Add a point source at x = 0 to a node field.

    In concentration mode the full amount (or rate) lands on node 0; in mass
    mode it is divided by dx.
    """
    field = np.asarray(field, dtype=float)
    return field + delta_contribution(len(field), g.dx, amount_or_rate, mode)
