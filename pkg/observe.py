"""
Observation and Signal Metrics for the Biofilm Electrochemical Signalling Simulator.

Probes sample the state at fixed coordinates; the recorder turns the samples
into a Trajectory of pandas DataFrames; the metric functions quantify pulse
shapes (peaks and attenuation), metabolic oscillations and growth arrest.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.signal import find_peaks

from grid import Grid
from model import BiofilmState
from src.config.settings import (
    DEFAULT_BASELINE_WINDOW_HR,
    DEFAULT_MIN_PROMINENCE,
    DEFAULT_OSCILLATION_THRESHOLD,
    DEFAULT_STALL_FRACTION,
    DEFAULT_TRANSIENT_SKIP_HR,
)
from src.exceptions import EmptySeriesError
from src.types import StateField, TimeSeries


SAMPLE_COLUMNS = ["t_hr", "probe_x_mm", "field", "value", "out_of_domain"]
SNAPSHOT_COLUMNS = ["t_hr", "x_mm", "K_e_mM", "in_biofilm"]
EVENT_COLUMNS = ["t_hr", "probe_x_mm", "field", "before", "after"]
LENGTH_COLUMNS = ["t_hr", "L_mm"]


class Probe(BaseModel):
    """Observation point at x (mm) recording a subset of the state fields."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    x: float = Field(ge=0)
    fields_recorded: tuple[StateField, ...] = (StateField.K_E, StateField.V)


class MetricSettings(BaseModel):
    """Thresholds and windows used to evaluate a run."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    field: StateField = StateField.K_E
    min_prominence: float = Field(DEFAULT_MIN_PROMINENCE, ge=0)  # mM
    baseline_window: float = Field(DEFAULT_BASELINE_WINDOW_HR, ge=0)  # hr
    search_start: Optional[float] = None  # hr
    min_distance: Optional[float] = Field(None, gt=0)  # hr
    oscillation_threshold: float = Field(DEFAULT_OSCILLATION_THRESHOLD, ge=0)  # mM
    transient_skip: float = Field(DEFAULT_TRANSIENT_SKIP_HR, ge=0)  # hr
    stall_fraction: float = Field(DEFAULT_STALL_FRACTION, ge=0)


@dataclass(frozen=True)
class ProbeReading:
    """Interpolated field values at a probe."""
    values: dict[str, float]
    out_of_domain: bool


@dataclass(frozen=True)
class PulseMetrics:
    """
    Peaks of a probe series.

    Attributes:
        peak_times: Peak times (hr)
        peak_amplitudes: Peak heights above baseline (mM), never negative
        baseline: Median of the pre-stimulus window (mM)
        attenuation_ratios: amplitude_k / amplitude_1 for k = 2..K
    """
    peak_times: list[float]
    peak_amplitudes: list[float]
    baseline: float
    attenuation_ratios: list[float]

    @property
    def mean_attenuation(self) -> Optional[float]:
        return float(np.mean(self.attenuation_ratios)) if self.attenuation_ratios else None


@dataclass
class Trajectory:
    """
    Recorded output of one run.

    Attributes:
        samples: Long-form probe samples, strictly increasing in time per (probe, field)
        L_series: Biofilm length over time
        snapshots: Space-time raster of K_e (None unless enabled)
        events: Probe values immediately before and after each impulse
        metadata: Config hash, parameter set, scenario and stimulus times
    """
    samples: pd.DataFrame
    L_series: pd.DataFrame
    snapshots: Optional[pd.DataFrame] = None
    events: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=EVENT_COLUMNS))
    metadata: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def probe_positions(self) -> list[float]:
        return sorted(self.samples["probe_x_mm"].unique().tolist())

    def series(self, probe_x: float, field_name: str) -> tuple[np.ndarray, np.ndarray]:
        """Time and value arrays of one (probe, field) stream."""
        rows = self.samples[(self.samples["probe_x_mm"] == probe_x) & (self.samples["field"] == field_name)]
        return rows["t_hr"].to_numpy(dtype=float), rows["value"].to_numpy(dtype=float)

    def length_series(self) -> tuple[np.ndarray, np.ndarray]:
        return self.L_series["t_hr"].to_numpy(dtype=float), self.L_series["L_mm"].to_numpy(dtype=float)


# =============================================================================
# SAMPLING
# =============================================================================

def interpolate_field(values: np.ndarray, g: Grid, x: np.ndarray) -> np.ndarray:
    """
    Linear interpolation of a node field at coordinates x.

    Points between the last node and beyond take the last-node value.
    """
    return np.interp(np.asarray(x, dtype=float), g.x, np.asarray(values, dtype=float))


def sample_probe(state: BiofilmState, g: Grid, probe: Probe) -> ProbeReading:
    """Probe values by linear interpolation; flagged out-of-domain when x > L."""
    values = {
        f.value: float(interpolate_field(state.field(f.value), g, probe.x))
        for f in probe.fields_recorded
    }
    return ProbeReading(values=values, out_of_domain=bool(probe.x > state.L))


class TrajectoryRecorder:
    """Accumulates samples during a run and builds the Trajectory."""

    def __init__(
        self,
        probes: list[Probe],
        raster_x: Optional[np.ndarray] = None,
        metadata: Optional[dict[str, Any]] = None,
    ):
        self.probes = probes
        self.raster_x = raster_x
        self.metadata = metadata or {}
        self._samples: list[tuple] = []
        self._lengths: list[tuple[float, float]] = []
        self._snapshots: list[tuple] = []
        self._events: list[tuple] = []

    def record(self, state: BiofilmState, g: Grid) -> None:
        for probe in self.probes:
            reading = sample_probe(state, g, probe)
            for name, value in reading.values.items():
                self._samples.append((state.t, probe.x, name, value, reading.out_of_domain))
        self._lengths.append((state.t, state.L))

    def record_snapshot(self, state: BiofilmState, g: Grid) -> None:
        if self.raster_x is None:
            return
        values = interpolate_field(state.nodes.K_e, g, self.raster_x)
        for x, value in zip(self.raster_x, values):
            self._snapshots.append((state.t, float(x), float(value), bool(x <= state.L)))

    def record_event(self, before: BiofilmState, after: BiofilmState, g: Grid) -> None:
        for probe in self.probes:
            pre = sample_probe(before, g, probe).values
            post = sample_probe(after, g, probe).values
            for name in pre:
                self._events.append((after.t, probe.x, name, pre[name], post[name]))

    def finish(self) -> Trajectory:
        snapshots = None
        if self.raster_x is not None:
            snapshots = pd.DataFrame(self._snapshots, columns=SNAPSHOT_COLUMNS)
        return Trajectory(
            samples=pd.DataFrame(self._samples, columns=SAMPLE_COLUMNS),
            L_series=pd.DataFrame(self._lengths, columns=LENGTH_COLUMNS),
            snapshots=snapshots,
            events=pd.DataFrame(self._events, columns=EVENT_COLUMNS),
            metadata=self.metadata,
        )


# =============================================================================
# METRICS
# =============================================================================

def _as_arrays(series: TimeSeries) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(series, tuple) and len(series) == 2 and isinstance(series[0], np.ndarray):
        return np.asarray(series[0], dtype=float), np.asarray(series[1], dtype=float)
    data = np.asarray(series, dtype=float).reshape(-1, 2)
    return data[:, 0], data[:, 1]


def detect_peaks(
    series: TimeSeries,
    min_prominence: float,
    baseline_window: float,
    search_start: Optional[float] = None,
    min_distance: Optional[float] = None,
) -> PulseMetrics:
    """
    Find the pulses of a probe series.

    Peaks are strict local maxima whose prominence (height above the higher
    of the two flanking minima) exceeds ``min_prominence``; a flat top is
    reported at its first sample. The baseline is the median over the first
    ``baseline_window`` hours.

    Args:
        series: (t, value) records in time order, or a (t, values) array pair
        min_prominence: Prominence a peak must exceed (mM)
        baseline_window: Length of the baseline window (hr)
        search_start: Ignore peaks before this time (hr)
        min_distance: Minimum separation between peaks (hr)

    Raises:
        EmptySeriesError: If the series has no samples
    """
    times, values = _as_arrays(series)
    if len(times) == 0:
        raise EmptySeriesError("cannot detect peaks in an empty series")

    window = values[times < times[0] + baseline_window]
    baseline = float(np.median(window)) if len(window) else float(values[0])

    kwargs: dict[str, Any] = {"prominence": (None, None), "plateau_size": (None, None)}
    if min_distance is not None and len(times) > 1:
        spacing = float(np.median(np.diff(times)))
        kwargs["distance"] = max(1, int(round(min_distance / spacing)))
    _, properties = find_peaks(values, **kwargs)

    keep = properties["prominences"] > min_prominence
    indices = properties["left_edges"][keep]
    if search_start is not None:
        indices = indices[times[indices] >= search_start]

    amplitudes = [max(float(values[i]) - baseline, 0.0) for i in indices]
    ratios = []
    if len(amplitudes) >= 2 and amplitudes[0] > 0:
        ratios = [a / amplitudes[0] for a in amplitudes[1:]]

    return PulseMetrics(
        peak_times=[float(times[i]) for i in indices],
        peak_amplitudes=amplitudes,
        baseline=baseline,
        attenuation_ratios=ratios,
    )


def count_oscillations(
    series: TimeSeries,
    threshold: float,
    transient_skip: float,
    baseline: Optional[float] = None,
) -> int:
    """
    Count excursions above baseline + threshold after the initial transient.

    The counter is armed while the series is below the baseline and fires
    once when it then reaches baseline + threshold; it starts armed only if
    the sample just before the skip lies below the baseline. Arming does not
    depend on the threshold, so the count is non-increasing in it. The
    baseline defaults to the median of the post-transient samples.
    """
    times, values = _as_arrays(series)
    if len(times) == 0:
        return 0

    start = int(np.searchsorted(times, times[0] + transient_skip, side="left"))
    if start >= len(times):
        return 0
    if baseline is None:
        baseline = float(np.median(values[start:]))
    level = baseline + threshold

    count = 0
    armed = bool(values[max(start - 1, 0)] < baseline)
    for value in values[start:]:
        if value < baseline:
            armed = True
        elif armed and value >= level:
            count += 1
            armed = False
    return count


def growth_arrest_intervals(
    L_series: TimeSeries,
    stall_fraction: float,
    stimulus_start: Optional[float] = None,
) -> list[tuple[float, float]]:
    """
    Maximal intervals where the biofilm stops growing.

    The growth rate is the centered finite difference of L; it is compared
    with ``stall_fraction`` times the mean rate before ``stimulus_start``
    (the whole series when no stimulus time is given). Zero growth always
    counts as arrested.
    """
    times, lengths = _as_arrays(L_series)
    if len(times) < 3:
        return []

    rate = np.gradient(lengths, times)
    reference = rate[times < stimulus_start] if stimulus_start is not None else rate
    if len(reference) == 0:
        reference = rate
    mean_rate = float(np.mean(reference))
    if mean_rate <= 0:
        return []

    stalled = (rate < stall_fraction * mean_rate) | (rate <= 0)
    intervals = []
    edges = np.diff(np.concatenate([[0], stalled.astype(int), [0]]))
    for first, last in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1) - 1):
        intervals.append((float(times[first]), float(times[last])))
    return intervals


def compute_metrics(traj: Trajectory, settings: MetricSettings) -> dict[str, dict[str, Any]]:
    """
    Metrics for every probe, keyed by the probe coordinate formatted in mm.

    Probes that did not record ``settings.field`` are skipped.
    """
    stimulus_times = traj.metadata.get("stimulus_times", [])
    stimulus_start = min(stimulus_times) if stimulus_times else None
    arrests = growth_arrest_intervals(traj.length_series(), settings.stall_fraction, stimulus_start)

    results: dict[str, dict[str, Any]] = {}
    for probe_x in traj.probe_positions:
        times, values = traj.series(probe_x, settings.field.value)
        if len(times) == 0:
            continue
        pulses = detect_peaks(
            (times, values),
            settings.min_prominence,
            settings.baseline_window,
            search_start=settings.search_start,
            min_distance=settings.min_distance,
        )
        results[f"{probe_x:g}"] = {
            "field": settings.field.value,
            "baseline": pulses.baseline,
            "peak_times": pulses.peak_times,
            "amplitudes": pulses.peak_amplitudes,
            "attenuation_ratios": pulses.attenuation_ratios,
            "mean_attenuation": pulses.mean_attenuation,
            "oscillation_count": count_oscillations(
                (times, values), settings.oscillation_threshold, settings.transient_skip
            ),
            "growth_arrest_intervals": [list(interval) for interval in arrests],
        }
    return results
