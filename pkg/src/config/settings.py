"""
Centralized Configuration Module for the Biofilm Electrochemical Signalling Simulator.

This module provides a single source of truth for the model constants,
numerical defaults and environment variables. All magic numbers used by the
model and the integrator should be defined here rather than scattered
throughout the codebase.

The hour is the canonical time unit, lengths are in mm, concentrations in mM
and voltages in mV.

Usage:
    from src.config.settings import (
        Parameters,
        DEFAULT_DX_MM,
        InitialConditions,
    )
"""

import os

from pydantic import BaseModel, ConfigDict, Field


# =============================================================================
# TRANSPORT CONSTANTS
# =============================================================================
# Diffusion coefficients inside the biofilm (mm^2/hr)
DEFAULT_D_G: float = 0.540
DEFAULT_D_K: float = 0.497

# Diffusion coefficients in the surrounding fluid (mm^2/hr)
DEFAULT_D_G_FLUID: float = 0.900
DEFAULT_D_K_FLUID: float = 4.97

# Far-field (long-range) concentrations in the fluid (mM)
DEFAULT_G_0: float = 30.0
DEFAULT_K_0: float = 8.0

# Boundary-layer width at the biofilm edge (mm)
DEFAULT_L_B: float = 0.5


# =============================================================================
# GLUTAMATE METABOLISM CONSTANTS
# =============================================================================
# Uptake rate, applied to the product G_e * (G_m - G_i) (1/(hr*mM))
DEFAULT_DELTA_G: float = 10.0

# Voltage above which uptake is blocked (mV)
DEFAULT_V_T: float = -150.0

# Maximum intracellular glutamate (mM)
DEFAULT_G_M: float = 20.0

# Consumption rate (1/hr) and basal consumption fraction (dimensionless)
DEFAULT_GAMMA_G: float = 1.125
DEFAULT_R_B: float = 0.1

# Glutamate bound below which cells do not grow (mM)
DEFAULT_G_U: float = 18.0

# Glutamate level below which cells hyperpolarize (mM)
DEFAULT_G_L: float = 10.0


# =============================================================================
# MEMBRANE AND CHANNEL CONSTANTS
# =============================================================================
# Voltage to potassium conversion (mM/mV)
DEFAULT_F: float = 5.6

# Gate strengths (1/hr)
DEFAULT_G_K: float = 180.0
DEFAULT_G_L_LEAK: float = 1.2

# Pump strength (1/(hr*mM)) and saturation threshold (mM)
DEFAULT_GAMMA_K: float = 0.025
DEFAULT_K_M: float = 300.0

# Gate opening/closing rates (1/hr) and Hill exponent
DEFAULT_ALPHA: float = 5.0
DEFAULT_BETA: float = 2.5
DEFAULT_M: int = 2

# Reversal potentials: basal values (mV) and slopes (mV/mM)
DEFAULT_V_K0: float = -380.0
DEFAULT_V_L0: float = -156.0
DEFAULT_DELTA_K: float = 1.0
DEFAULT_DELTA_L: float = 60.0

# Acclimation rate of cells to potassium changes (1/hr)
DEFAULT_ETA_K: float = 30.0

# Intracellular potassium reserve below which net release is throttled (mM);
# zero disables the throttle
DEFAULT_K_RESERVE: float = 50.0


# =============================================================================
# GROWTH CONSTANTS
# =============================================================================
# Voltage influence shape and transition speed (dimensionless)
DEFAULT_ETA_V: float = 20.0
DEFAULT_GAMMA_V: float = 20.0

# Voltage below which cells do not grow (mV)
DEFAULT_V_LOW: float = -175.0

# Biomass produced per glutamate (mm/(mM*hr))
DEFAULT_DELTA_GROW: float = 0.0075


# Fields that must be strictly positive in a physical parameter set
POSITIVE_FIELDS: tuple[str, ...] = (
    "D_G", "D_K", "D_G_fl", "D_K_fl", "L_b",
    "delta_G", "G_m", "F", "g_K", "g_L", "gamma_K", "K_m",
    "gamma_G", "G_u", "eta_V", "gamma_V", "delta_g", "eta_K",
    "alpha", "beta", "G_l",
)


class Parameters(BaseModel):
    """
    Every constant of the biofilm model.

    Values may be zeroed (e.g. a diffusion-only configuration) but never
    negative; strict positivity and the threshold orderings are reported by
    ``problems()`` and enforced when a configuration is loaded.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    # Transport
    D_G: float = Field(DEFAULT_D_G, ge=0)  # mm^2/hr
    D_K: float = Field(DEFAULT_D_K, ge=0)  # mm^2/hr
    D_G_fl: float = Field(DEFAULT_D_G_FLUID, ge=0)  # mm^2/hr
    D_K_fl: float = Field(DEFAULT_D_K_FLUID, ge=0)  # mm^2/hr
    G_0: float = Field(DEFAULT_G_0, ge=0)  # mM
    K_0: float = Field(DEFAULT_K_0, ge=0)  # mM
    L_b: float = Field(DEFAULT_L_B, ge=0)  # mm

    # Glutamate
    delta_G: float = Field(DEFAULT_DELTA_G, ge=0)  # 1/(hr*mM)
    V_t: float = DEFAULT_V_T  # mV
    G_m: float = Field(DEFAULT_G_M, ge=0)  # mM
    gamma_G: float = Field(DEFAULT_GAMMA_G, ge=0)  # 1/hr
    r_b: float = Field(DEFAULT_R_B, ge=0)
    G_u: float = Field(DEFAULT_G_U, ge=0)  # mM
    G_l: float = Field(DEFAULT_G_L, ge=0)  # mM

    # Membrane
    F: float = Field(DEFAULT_F, ge=0)  # mM/mV
    g_K: float = Field(DEFAULT_G_K, ge=0)  # 1/hr
    g_L: float = Field(DEFAULT_G_L_LEAK, ge=0)  # 1/hr
    gamma_K: float = Field(DEFAULT_GAMMA_K, ge=0)  # 1/(hr*mM)
    K_m: float = Field(DEFAULT_K_M, ge=0)  # mM
    alpha: float = Field(DEFAULT_ALPHA, ge=0)  # 1/hr
    beta: float = Field(DEFAULT_BETA, ge=0)  # 1/hr
    m: float = Field(DEFAULT_M, ge=1)
    V_K0: float = DEFAULT_V_K0  # mV
    V_L0: float = DEFAULT_V_L0  # mV
    delta_K: float = DEFAULT_DELTA_K  # mV/mM
    delta_L: float = DEFAULT_DELTA_L  # mV/mM
    eta_K: float = Field(DEFAULT_ETA_K, ge=0)  # 1/hr
    K_r: float = Field(DEFAULT_K_RESERVE, ge=0)  # mM

    # Growth
    eta_V: float = Field(DEFAULT_ETA_V, ge=0)
    gamma_V: float = Field(DEFAULT_GAMMA_V, ge=0)
    V_l: float = DEFAULT_V_LOW  # mV
    delta_g: float = Field(DEFAULT_DELTA_GROW, ge=0)  # mm/(mM*hr)

    def problems(self) -> list[tuple[str, str]]:
        """
        Sanity checks of a physical parameter set.

        Returns:
            List of (field, message) pairs (empty if the set is physical)
        """
        found = []

        for name in POSITIVE_FIELDS:
            if getattr(self, name) <= 0:
                found.append((name, "must be strictly positive"))

        if not self.G_l < self.G_u:
            found.append(("G_l", f"G_l ({self.G_l}) must be below G_u ({self.G_u})"))
        if not self.G_u < self.G_m:
            found.append(("G_u", f"G_u ({self.G_u}) must be below G_m ({self.G_m})"))
        if not self.K_m > self.K_0:
            found.append(("K_m", f"K_m ({self.K_m}) must exceed K_0 ({self.K_0})"))
        if not self.K_r < self.K_m:
            found.append(("K_r", f"K_r ({self.K_r}) must be below K_m ({self.K_m})"))
        if not self.V_l < self.V_t:
            found.append(("V_l", f"V_l ({self.V_l}) must be below V_t ({self.V_t})"))
        if self.m != int(self.m):
            found.append(("m", f"gate exponent should be integer-valued, got {self.m}"))

        return found


# =============================================================================
# INITIAL CONDITIONS
# =============================================================================
# Uniform initial state of every node
DEFAULT_INITIAL_G_E: float = 30.0  # mM
DEFAULT_INITIAL_K_E: float = 8.0  # mM
DEFAULT_INITIAL_G_I: float = 20.0  # mM
DEFAULT_INITIAL_K_I: float = 300.0  # mM
DEFAULT_INITIAL_K_AC: float = 9.0  # mM
DEFAULT_INITIAL_V: float = -156.0  # mV
DEFAULT_INITIAL_N: float = 0.1

# Initial biofilm length (mm)
DEFAULT_INITIAL_L: float = 0.12

# Initial length of the signal-propagation presets (mm), long enough that a
# probe at 10 mm lies inside the biofilm
SIGNAL_PRESET_INITIAL_L: float = 12.0


class InitialConditions(BaseModel):
    """Uniform initial state of the biofilm."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    G_e: float = Field(DEFAULT_INITIAL_G_E, ge=0)
    K_e: float = Field(DEFAULT_INITIAL_K_E, ge=0)
    G_i: float = Field(DEFAULT_INITIAL_G_I, ge=0)
    K_i: float = Field(DEFAULT_INITIAL_K_I, ge=0)
    K_ac: float = Field(DEFAULT_INITIAL_K_AC, ge=0)
    V: float = DEFAULT_INITIAL_V
    n: float = Field(DEFAULT_INITIAL_N, ge=0, le=1)


# =============================================================================
# NUMERICAL CONSTANTS
# =============================================================================
# Node spacing (mm)
DEFAULT_DX_MM: float = 0.05

# Time step (hr); keeps the stiffest edge-node mode (diffusion, fluid
# exchange, leak and throttled release) inside the RK4 stability region at
# DEFAULT_DX_MM
DEFAULT_DT_HR: float = 0.001

# Fraction of the explicit diffusion bound dx^2/(2 max(D)) allowed for dt
DEFAULT_CFL_SAFETY: float = 0.9

# Probe recording cadence (hr)
DEFAULT_RECORD_EVERY_HR: float = 0.05

# Default horizon (hr)
DEFAULT_T_END_HR: float = 25.0

# Exponent clamp for exp and tanh arguments
EXP_CLAMP: float = 50.0

# Clamp tolerances
CONCENTRATION_TOLERANCE: float = 1e-6  # mM
GATE_TOLERANCE: float = 1e-9

# Magnitude beyond which any field is treated as a blow-up
BLOWUP_MAGNITUDE: float = 1e9

# Tolerance used when counting grid lines crossed by L (relative to dx)
GRID_LINE_TOLERANCE: float = 1e-9


# =============================================================================
# METRIC CONSTANTS
# =============================================================================
# Minimum peak prominence (mM) and oscillation threshold above baseline (mM)
DEFAULT_MIN_PROMINENCE: float = 1.0
DEFAULT_OSCILLATION_THRESHOLD: float = 5.0

# Pre-stimulus baseline window (hr)
DEFAULT_BASELINE_WINDOW_HR: float = 4.0

# Initial transient ignored by oscillation counting (hr)
DEFAULT_TRANSIENT_SKIP_HR: float = 2.0

# Growth-rate fraction below which the biofilm counts as arrested
DEFAULT_STALL_FRACTION: float = 0.5


# =============================================================================
# OUTPUT CONSTANTS
# =============================================================================
# Significant digits of fixed-point CSV values
CSV_SIGNIFICANT_DIGITS: int = 9

# Default raster of the space-time output
DEFAULT_SPACETIME_EVERY_HR: float = 1.0
DEFAULT_SPACETIME_POINTS: int = 100

# Raster extent as a multiple of the initial length when none is given
DEFAULT_SPACETIME_EXTENT_FACTOR: float = 1.25

# File names written into --out-dir
TIMESERIES_FILENAME: str = "timeseries.csv"
SPACETIME_FILENAME: str = "spacetime.csv"
METRICS_FILENAME: str = "metrics.json"
SVG_FILENAME: str = "probe.svg"
SWEEP_SUMMARY_FILENAME: str = "sweep_summary.csv"
EVENTS_FILENAME: str = "events.csv"

# Pulse periods (hr) swept by default; the first and last bracket the attenuation comparison
DEFAULT_SWEEP_PERIODS_HR: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)

# Salt for matplotlib SVG element ids, fixed so plots are byte-identical
SVG_HASH_SALT: str = "biofilm-ecom"


# =============================================================================
# ENVIRONMENT
# =============================================================================
THREADS_ENV_VAR: str = "BIOFILM_ECOM_THREADS"


def get_sweep_threads(default: int = 1) -> int:
    """
    Maximum number of parallel sweep workers.

    Environment variables (if set):
        BIOFILM_ECOM_THREADS
    """
    raw = os.getenv(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


# =============================================================================
# APPLICATION METADATA
# =============================================================================
APP_VERSION: str = "1.0.0"
APP_NAME: str = "biofilm-ecom"


# =============================================================================
# CONFIGURATION VALIDATION
# =============================================================================
def validate_configuration() -> list[str]:
    """
    Validate critical configuration values.

    Returns:
        List of warning messages (empty if valid)
    """
    warnings = [f"{name}: {msg}" for name, msg in Parameters().problems()]

    stability_bound = DEFAULT_CFL_SAFETY * DEFAULT_DX_MM ** 2 / (2 * max(DEFAULT_D_G, DEFAULT_D_K))
    if DEFAULT_DT_HR > stability_bound:
        warnings.append("Default time step exceeds the explicit diffusion bound")

    if not (0 < DEFAULT_CFL_SAFETY <= 1):
        warnings.append("CFL safety factor must be in (0, 1]")

    if DEFAULT_RECORD_EVERY_HR < DEFAULT_DT_HR:
        warnings.append("Recording cadence should not be finer than the time step")

    return warnings


# Run validation on module import
_config_warnings = validate_configuration()
if _config_warnings:
    import warnings as _warnings
    for msg in _config_warnings:
        _warnings.warn(f"Configuration warning: {msg}")
