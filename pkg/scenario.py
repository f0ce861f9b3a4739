"""
Experiment Configuration for the Biofilm Electrochemical Signalling Simulator.

An ExperimentConfig bundles the model parameters, initial state, grid, step
control, stimulation signals, probes, metric settings and output paths of
one run. Configurations are JSON documents; every section is optional and
falls back to the defaults in ``src.config.settings``. The committed presets
in ``src/config/presets`` reproduce the reference experiments.
"""

import json
from pathlib import Path
from typing import Any, Optional, Union

import pydantic
from pydantic import BaseModel, ConfigDict, Field

from integrator import StepControl
from observe import MetricSettings, Probe
from signals import InputSignal
from src.config import PRESET_DIR
from src.config.settings import (
    DEFAULT_DX_MM,
    DEFAULT_SPACETIME_EVERY_HR,
    DEFAULT_SPACETIME_EXTENT_FACTOR,
    DEFAULT_SPACETIME_POINTS,
    METRICS_FILENAME,
    SIGNAL_PRESET_INITIAL_L,
    TIMESERIES_FILENAME,
    InitialConditions,
    Parameters,
)
from src.exceptions import ConfigParseError, OutputError, UnknownPresetError, ValidationError
from src.types import DeltaMode, SignalKind, StateField
from src.utils.logging import get_logger


logger = get_logger(__name__)

PRESET_NAMES: tuple[str, ...] = (
    "quench-off",
    "quench-on",
    "impulse",
    "impulse-train",
    "spacetime",
    "pulse-train",
)

# Presets that accept a pulse-period override
PERIODIC_PRESETS: tuple[str, ...] = ("pulse-train",)

DEFAULT_PROBE_X_MM: float = 10.0


class GridSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dx: float = Field(DEFAULT_DX_MM, gt=0)  # mm
    initial_L: float = Field(SIGNAL_PRESET_INITIAL_L, gt=0)  # mm
    delta_mode: DeltaMode = DeltaMode.CONCENTRATION


class SignalSet(BaseModel):
    """Inputs at x = 0; both default to no stimulation."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    glutamate: InputSignal = Field(default_factory=InputSignal.none)
    potassium: InputSignal = Field(default_factory=InputSignal.none)


class SpacetimeSettings(BaseModel):
    """
    Fixed output raster of extracellular potassium.

    Attributes:
        enabled: Record the raster at all
        every: Snapshot cadence (hr); the first snapshot is taken at ``every``
        points: Raster points from 0 to the extent
        x_max: Raster extent (mm); defaults to a multiple of the initial length
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    enabled: bool = False
    every: float = Field(DEFAULT_SPACETIME_EVERY_HR, gt=0)
    points: int = Field(DEFAULT_SPACETIME_POINTS, ge=2)
    x_max: Optional[float] = Field(None, gt=0)

    def extent(self, initial_L: float) -> float:
        return self.x_max if self.x_max is not None else DEFAULT_SPACETIME_EXTENT_FACTOR * initial_L


class OutputSettings(BaseModel):
    """Output file names, relative to the output directory."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    timeseries_path: str = Field(TIMESERIES_FILENAME, min_length=1)
    spacetime_path: Optional[str] = Field(None, min_length=1)
    metrics_path: str = Field(METRICS_FILENAME, min_length=1)
    svg_path: Optional[str] = Field(None, min_length=1)
    svg_field: StateField = StateField.K_E


class ExperimentConfig(BaseModel):
    """Complete, validated description of one simulation run."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Optional[str] = None
    parameters: Parameters = Field(default_factory=Parameters)
    allow_unphysical: bool = False
    initial: InitialConditions = Field(default_factory=InitialConditions)
    grid: GridSettings = Field(default_factory=GridSettings)
    step: StepControl = Field(default_factory=StepControl)
    signals: SignalSet = Field(default_factory=SignalSet)
    probes: tuple[Probe, ...] = (Probe(x=DEFAULT_PROBE_X_MM),)
    spacetime: SpacetimeSettings = Field(default_factory=SpacetimeSettings)
    metrics: MetricSettings = Field(default_factory=MetricSettings)
    outputs: OutputSettings = Field(default_factory=OutputSettings)


# =============================================================================
# VALIDATION
# =============================================================================

def _field_path(loc: tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc) or "config"


def _check_invariants(config: ExperimentConfig) -> None:
    """Cross-field invariants that a single section cannot check on its own."""
    if config.scenario is not None and config.scenario not in PRESET_NAMES:
        raise UnknownPresetError(config.scenario, list(PRESET_NAMES))

    if not config.allow_unphysical:
        problems = config.parameters.problems()
        if problems:
            name, message = problems[0]
            raise ValidationError(f"{message} (set allow_unphysical to override)", field=f"parameters.{name}")

    config.step.check_stability(config.grid.dx, config.parameters)

    if config.signals.glutamate.kind is SignalKind.IMPULSE_TRAIN:
        raise ValidationError(
            "glutamate accepts constant_supply or pulse_train inputs only",
            field="signals.glutamate.kind",
        )

    if not config.probes:
        raise ValidationError("at least one probe is required", field="probes")
    if config.metrics.field not in config.probes[0].fields_recorded:
        raise ValidationError(
            f"metric field {config.metrics.field.value} is not recorded by the first probe",
            field="metrics.field",
        )


def config_from_dict(data: Any) -> ExperimentConfig:
    """
    Build and validate a configuration from parsed JSON.

    Raises:
        ValidationError: Naming the dotted path of the first offending field
    """
    if not isinstance(data, dict):
        raise ValidationError(f"configuration must be a JSON object, got {type(data).__name__}", field="config")
    try:
        config = ExperimentConfig.model_validate(data)
    except pydantic.ValidationError as exc:
        first = exc.errors()[0]
        raise ValidationError(first["msg"], field=_field_path(first["loc"])) from exc
    _check_invariants(config)
    return config


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read a JSON configuration file.

    Unspecified sections and parameters take their defaults, so an empty
    object gives the unstimulated (quench-off) experiment.

    Raises:
        OutputError: If the file cannot be read
        ConfigParseError: On malformed JSON
        ValidationError: On any invariant violation (names the field)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot read configuration: {exc}", path=str(path)) from exc

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc

    config = config_from_dict(data)
    logger.debug("Configuration loaded", extra={"path": str(path), "scenario": config.scenario})
    return config


def preset(name: str, period: Optional[float] = None) -> ExperimentConfig:
    """
    Committed configuration of a reference experiment.

    Args:
        name: One of PRESET_NAMES
        period: Pulse period T_p override (pulse-train only)

    Raises:
        UnknownPresetError: If the name is not a committed preset
        ValidationError: If a period is given to a non-periodic preset or is below the pulse width
    """
    if name not in PRESET_NAMES:
        raise UnknownPresetError(name, list(PRESET_NAMES))

    config = load_config(PRESET_DIR / f"{name}.json")
    if period is None:
        return config
    if name not in PERIODIC_PRESETS:
        raise ValidationError(f"preset '{name}' has no pulse period to override", field="period")

    data = config.model_dump(mode="json")
    data["signals"]["potassium"]["period"] = period
    return config_from_dict(data)


def dump_config(config: ExperimentConfig, path: Optional[Union[str, Path]] = None) -> str:
    """
    Canonical JSON form of a configuration; written to ``path`` when given.

    ``load_config`` of the dumped document reproduces an equal configuration.
    """
    text = json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise OutputError(f"cannot write configuration: {exc}", path=str(path)) from exc
    return text

