"""
Output Generation for the Biofilm Electrochemical Signalling Simulator.

Writes the recorded trajectory and its metrics to disk: probe time series
and space-time rasters as CSV, metrics as JSON and probe traces as static
SVG line charts. Every emitter is byte-deterministic so reruns of the same
configuration produce identical files.
"""

import json
import math
from pathlib import Path
from typing import Any, Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from observe import Trajectory
from src.config.settings import CSV_SIGNIFICANT_DIGITS, SVG_HASH_SALT
from src.exceptions import OutputError, ValidationError
from src.types import StateField
from src.utils.logging import get_logger


logger = get_logger(__name__)

PathLike = Union[str, Path]

SWEEP_COLUMNS = ["period_hr", "peak_count", "mean_attenuation"]

# Figure style for probe traces
PLOT_PARAMS: dict[str, Any] = {
    "svg.hashsalt": SVG_HASH_SALT,
    "svg.fonttype": "path",
    "figure.figsize": [7.0, 3.6],
    "font.family": "sans-serif",
    "font.sans-serif": ["DejaVu Sans"],
    "font.size": 9,
    "axes.labelsize": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}
TRACE_COLOR = "#2b8cbe"
STIMULUS_COLOR = "#d95f0e"


def format_value(value: Any) -> str:
    """
    Render one CSV cell.

    Floats are written fixed-point with CSV_SIGNIFICANT_DIGITS significant
    digits counted from the integer part (|x| < 1 counts as one digit);
    booleans are lowercase.
    """
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    number = float(value)
    integer_digits = len(str(int(abs(number)))) if abs(number) >= 1 else 1
    decimals = max(0, CSV_SIGNIFICANT_DIGITS - integer_digits)
    text = f"{number:.{decimals}f}"
    return "0" + text[2:] if text.startswith("-0") and float(text) == 0 else text


def _format_frame(df: pd.DataFrame) -> pd.DataFrame:
    formatted = pd.DataFrame(index=df.index)
    for column in df.columns:
        formatted[column] = df[column].map(format_value).astype(str)
    return formatted


def _write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write output: {exc}", path=str(path)) from exc
    logger.info("Output written", extra={"path": str(path), "bytes": len(text.encode("utf-8"))})
    return path


def _write_csv(df: pd.DataFrame, path: PathLike) -> Path:
    text = _format_frame(df).to_csv(index=False, lineterminator="\n")
    return _write_text(path, text)


def emit_timeseries_csv(traj: Trajectory, path: PathLike) -> Path:
    """
    Write the probe samples: ``t_hr,probe_x_mm,field,value,out_of_domain``.

    Raises:
        ValidationError: If the trajectory has no samples
        OutputError: On I/O failure
    """
    if len(traj) == 0:
        raise ValidationError("trajectory has no probe samples", field="probes")
    samples = traj.samples.sort_values("t_hr", kind="stable")
    return _write_csv(samples, path)


def emit_events_csv(traj: Trajectory, path: PathLike) -> Path:
    """Write the before/after probe values of every impulse."""
    return _write_csv(traj.events, path)


def emit_spacetime_csv(traj: Trajectory, path: PathLike) -> Path:
    """
    Write the K_e raster: ``t_hr,x_mm,K_e_mM,in_biofilm``.

    Raises:
        ValidationError: If snapshots were not recorded
        OutputError: On I/O failure
    """
    if traj.snapshots is None:
        raise ValidationError("space-time output requested but snapshots are disabled", field="spacetime.enabled")
    return _write_csv(traj.snapshots, path)


def emit_metrics_json(metrics: dict[str, Any], path: PathLike) -> Path:
    """Write the per-probe metrics with sorted keys."""
    return _write_text(path, json.dumps(metrics, indent=2, sort_keys=True) + "\n")


def emit_sweep_summary(rows: list[dict[str, Any]], path: PathLike) -> Path:
    """Write one row per pulse period: ``period_hr,peak_count,mean_attenuation``."""
    df = pd.DataFrame(rows, columns=SWEEP_COLUMNS).sort_values("period_hr", kind="stable")
    return _write_csv(df.astype(object), path)


def emit_svg_plot(
    traj: Trajectory,
    field: StateField,
    probe_x: float,
    path: PathLike,
    title: Optional[str] = None,
) -> Path:
    """
    Line chart of one probe field with a marker at every stimulus time.

    Raises:
        ValidationError: If the probe did not record the field
        OutputError: On I/O failure
    """
    field = StateField(field)
    times, values = traj.series(probe_x, field.value)
    if len(times) == 0:
        raise ValidationError(
            f"no {field.value} samples at probe x = {probe_x:g} mm", field="outputs.svg_field"
        )

    path = Path(path)
    with plt.rc_context(PLOT_PARAMS):
        fig, ax = plt.subplots()
        try:
            ax.plot(times, values, color=TRACE_COLOR, label=f"{field.value} at x = {probe_x:g} mm")
            for k, t in enumerate(traj.metadata.get("stimulus_times", [])):
                ax.axvline(
                    t, color=STIMULUS_COLOR, linestyle="--", linewidth=0.8,
                    label="stimulus" if k == 0 else None,
                )
            ax.set_xlabel("time (hr)")
            ax.set_ylabel(f"{field.value} ({field.unit})")
            ax.set_xlim(float(times[0]), float(times[-1]) if times[-1] > times[0] else float(times[0]) + 1.0)
            if title:
                ax.set_title(title)
            ax.legend(loc="best", frameon=False)
            fig.tight_layout()

            path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OutputError(f"cannot write plot: {exc}", path=str(path)) from exc
        finally:
            plt.close(fig)

    logger.info("Plot written", extra={"path": str(path), "field": field.value, "probe_x_mm": probe_x})
    return path
