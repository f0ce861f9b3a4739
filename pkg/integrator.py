"""
Time Integration for the Biofilm Electrochemical Signalling Simulator.

The extracellular PDEs are discretized in space (method of lines) and the
resulting ODE system, together with the biofilm length L, is advanced with
the classical four-stage Runge-Kutta scheme at a fixed step. Steps are
shortened to land exactly on impulse times, pulse edges and recording
instants, so discontinuous forcing never falls inside a step.
"""

import hashlib
import logging
import math
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from grid import BoundarySpec, Grid, extend_domain, growth_rate, laplacian_with_bcs
from model import (
    BiofilmState,
    NodeDerivative,
    NodeState,
    check_finite,
    growth_propensity,
    node_reaction_rhs,
    uniform_state,
)
from observe import Trajectory, TrajectoryRecorder
from signals import InputSignal, continuous_rate, delta_contribution, pending_impulses
from src.config.settings import (
    BLOWUP_MAGNITUDE,
    CONCENTRATION_TOLERANCE,
    DEFAULT_CFL_SAFETY,
    DEFAULT_DT_HR,
    DEFAULT_RECORD_EVERY_HR,
    DEFAULT_T_END_HR,
    GATE_TOLERANCE,
    Parameters,
)
from src.exceptions import StabilityError, StateCorruptionError, ValidationError
from src.types import DeltaMode
from src.utils.logging import get_integrator_logger

if TYPE_CHECKING:
    from scenario import ExperimentConfig


logger = get_integrator_logger()

# Relative slack (in units of dt) under which a step is stretched onto a breakpoint
LANDING_SLACK: float = 1e-9

CONCENTRATION_FIELDS: tuple[str, ...] = ("G_e", "K_e", "G_i", "K_i", "K_ac")


class StepControl(BaseModel):
    """
    Fixed-step settings.

    Attributes:
        dt: Time step (hr)
        cfl_safety: Fraction of the explicit diffusion bound allowed for dt
        t_end: Horizon (hr)
        record_every: Probe recording cadence (hr)
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(DEFAULT_DT_HR, gt=0)
    cfl_safety: float = Field(DEFAULT_CFL_SAFETY, gt=0, le=1)
    t_end: float = Field(DEFAULT_T_END_HR, ge=0)
    record_every: float = Field(DEFAULT_RECORD_EVERY_HR, gt=0)

    def stability_bound(self, dx: float, p: Parameters) -> float:
        """Largest admissible dt: cfl_safety * dx^2 / (2 max(D_G, D_K))."""
        diffusivity = max(p.D_G, p.D_K)
        if diffusivity <= 0:
            return math.inf
        return self.cfl_safety * dx ** 2 / (2.0 * diffusivity)

    def check_stability(self, dx: float, p: Parameters) -> None:
        """
        Raises:
            ValidationError: Naming step.dt when dt exceeds the diffusion bound
        """
        bound = self.stability_bound(dx, p)
        if self.dt > bound:
            raise ValidationError(
                f"dt = {self.dt} hr exceeds the explicit stability bound {bound:.6g} hr "
                f"for dx = {dx} mm (cfl_safety = {self.cfl_safety})",
                field="step.dt",
            )


@dataclass(frozen=True)
class RightHandSide:
    """Full time derivative: per-node fields plus the elongation rate."""
    nodes: NodeDerivative
    dL: float

    def to_vector(self) -> np.ndarray:
        return np.concatenate([*self.nodes.values(), [self.dL]])


def _derivative(
    state: BiofilmState,
    p: Parameters,
    g: Grid,
    rate_G: float,
    rate_K: float,
    delta_mode: DeltaMode,
) -> RightHandSide:
    s = state.nodes
    reaction = node_reaction_rhs(s, p)

    dG_e = reaction.dG_e + delta_contribution(g.n_nodes, g.dx, rate_G, delta_mode)
    dK_e = reaction.dK_e + delta_contribution(g.n_nodes, g.dx, rate_K, delta_mode)
    if p.D_G > 0:
        dG_e = dG_e + p.D_G * laplacian_with_bcs(s.G_e, g, BoundarySpec.glutamate(p))
    if p.D_K > 0:
        dK_e = dK_e + p.D_K * laplacian_with_bcs(s.K_e, g, BoundarySpec.potassium(p))

    nodes = NodeDerivative(
        dG_e=dG_e,
        dK_e=dK_e,
        dG_i=reaction.dG_i,
        dK_i=reaction.dK_i,
        dK_ac=reaction.dK_ac,
        dV=reaction.dV,
        dn=reaction.dn,
    )
    check_finite(nodes)

    dL = growth_rate(s.G_i, growth_propensity(s.G_i, s.V, p), g, p, L=state.L)
    if not math.isfinite(dL):
        raise StateCorruptionError("non-finite growth rate", field="L")
    return RightHandSide(nodes=nodes, dL=dL)


def full_rhs(
    state: BiofilmState,
    t: float,
    p: Parameters,
    sig_G: InputSignal,
    sig_K: InputSignal,
    g: Grid,
    delta_mode: DeltaMode = DeltaMode.CONCENTRATION,
) -> RightHandSide:
    """
    Time derivative of every node field and of L at time t.

    Diffusion with the boundary conditions and the point sources at x = 0
    are added to the reaction terms of the extracellular fields.

    Raises:
        StateCorruptionError: On a non-finite derivative (names node and field)
    """
    return _derivative(
        state, p, g, continuous_rate(sig_G, t), continuous_rate(sig_K, t), delta_mode
    )


def _enforce_bounds(state: BiofilmState, p: Parameters) -> BiofilmState:
    """Clamp round-off excursions of n and the concentrations; fault on anything larger."""
    t = state.t
    vector = state.to_vector()
    if not np.all(np.isfinite(vector)) or np.max(np.abs(vector)) > BLOWUP_MAGNITUDE:
        raise StabilityError(f"state left the finite range |y| <= {BLOWUP_MAGNITUDE:g}", t=t)

    changes = {}
    for name in CONCENTRATION_FIELDS:
        values = state.field(name)
        node = int(np.argmin(values))
        lowest = float(values[node])
        if lowest < -CONCENTRATION_TOLERANCE:
            raise StabilityError(
                f"{name} = {lowest:.3g} mM at node {node} is below 0 "
                f"by more than the {CONCENTRATION_TOLERANCE:g} mM tolerance",
                t=t,
                field=name,
                node=node,
            )
        changes[name] = np.maximum(values, 0.0)

    node = int(np.argmax(state.nodes.G_i))
    excess = float(state.nodes.G_i[node]) - p.G_m
    if excess > CONCENTRATION_TOLERANCE:
        raise StabilityError(
            f"G_i = {p.G_m + excess:.6g} mM at node {node} exceeds G_m = {p.G_m:g} mM",
            t=t,
            field="G_i",
            node=node,
        )
    changes["G_i"] = np.minimum(changes["G_i"], p.G_m)

    gate = state.nodes.n
    outside = np.flatnonzero((gate < -GATE_TOLERANCE) | (gate > 1.0 + GATE_TOLERANCE))
    if outside.size:
        node = int(outside[0])
        raise StabilityError(
            f"n = {float(gate[node]):.6g} at node {node} is outside [0, 1]", t=t, field="n", node=node
        )
    changes["n"] = np.clip(gate, 0.0, 1.0)

    return state.with_nodes(**changes)


def rk4_step(
    state: BiofilmState,
    dt: float,
    p: Parameters,
    sig_G: InputSignal,
    sig_K: InputSignal,
    g: Grid,
    delta_mode: DeltaMode = DeltaMode.CONCENTRATION,
    t_next: Optional[float] = None,
) -> tuple[BiofilmState, Grid]:
    """
    Advance the full state (fields and L) by one classical RK4 step.

    The source rates are evaluated at the step midpoint and held for all four
    stages; callers never let a step straddle a forcing discontinuity. After
    the update, n and the concentrations are clamped within tolerance and
    the grid is extended if L crossed a grid line.

    Args:
        t_next: Exact end time of the step (defaults to state.t + dt)

    Returns:
        The new state and the (possibly extended) grid

    Raises:
        StabilityError: On blow-up or a clamp-tolerance violation
    """
    t0 = state.t
    t1 = t0 + dt if t_next is None else t_next
    rate_G = continuous_rate(sig_G, t0 + 0.5 * dt)
    rate_K = continuous_rate(sig_K, t0 + 0.5 * dt)

    def f(vector: np.ndarray, t: float) -> np.ndarray:
        stage = BiofilmState.from_vector(vector, t)
        return _derivative(stage, p, g, rate_G, rate_K, delta_mode).to_vector()

    y0 = state.to_vector()
    try:
        k1 = f(y0, t0)
        k2 = f(y0 + 0.5 * dt * k1, t0 + 0.5 * dt)
        k3 = f(y0 + 0.5 * dt * k2, t0 + 0.5 * dt)
        k4 = f(y0 + dt * k3, t1)
    except StateCorruptionError as exc:
        raise StabilityError(f"RK4 stage evaluation failed: {exc.message}", t=t0) from exc

    y1 = y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    try:
        new_state = BiofilmState.from_vector(y1, t1)
    except StateCorruptionError as exc:
        raise StabilityError(exc.message, t=t1) from exc

    new_state = _enforce_bounds(new_state, p)
    try:
        return extend_domain(new_state, g)
    except StateCorruptionError as exc:
        raise StabilityError(exc.message, t=t1) from exc


# =============================================================================
# EXPERIMENT LOOP
# =============================================================================

def _grid_times(every: float, t_end: float, first: int = 0) -> list[float]:
    count = int(math.floor(t_end / every + LANDING_SLACK))
    return [k * every for k in range(first, count + 1)]


def initial_state(config: "ExperimentConfig") -> tuple[BiofilmState, Grid]:
    """Uniform initial condition on the initial grid."""
    grid = Grid.for_length(config.grid.initial_L, config.grid.dx)
    ic = config.initial
    node = NodeState(G_e=ic.G_e, K_e=ic.K_e, G_i=ic.G_i, K_i=ic.K_i, K_ac=ic.K_ac, V=ic.V, n=ic.n)
    return uniform_state(node, grid.n_nodes, config.grid.initial_L), grid


def _apply_impulses(
    state: BiofilmState,
    g: Grid,
    sig_K: InputSignal,
    t0: float,
    t1: float,
    delta_mode: DeltaMode,
) -> BiofilmState:
    for event_time, magnitude in pending_impulses(sig_K, t0, t1):
        contribution = delta_contribution(g.n_nodes, g.dx, magnitude, delta_mode)
        state = state.with_nodes(K_e=state.nodes.K_e + contribution)
        logger.info("Impulse applied", extra={"t_hr": event_time, "magnitude_mM": magnitude})
    return state


def config_fingerprint(config: "ExperimentConfig") -> str:
    """SHA-256 of the canonical JSON form of a configuration."""
    return hashlib.sha256(config.model_dump_json().encode("utf-8")).hexdigest()


def run(config: "ExperimentConfig") -> Trajectory:
    """
    Integrate one experiment from the initial condition to t_end.

    Probes are sampled every ``record_every`` hours, impulses are applied
    exactly at their nominal times (with before/after event samples) and the
    optional space-time raster is recorded at its own cadence. Identical
    configurations give bit-identical trajectories.

    Raises:
        ValidationError: If dt exceeds the stability bound
        StabilityError: On blow-up, with the simulation time at failure
    """
    p = config.parameters
    step = config.step
    step.check_stability(config.grid.dx, p)
    sig_G = config.signals.glutamate
    sig_K = config.signals.potassium
    delta_mode = config.grid.delta_mode

    state, grid = initial_state(config)

    raster = None
    snapshot_times: set[float] = set()
    if config.spacetime.enabled:
        raster = np.linspace(0.0, config.spacetime.extent(config.grid.initial_L), config.spacetime.points)
        snapshot_times = set(_grid_times(config.spacetime.every, step.t_end, first=1))

    stimulus_times = sorted(set(sig_G.stimulus_times()) | set(sig_K.stimulus_times()))
    recorder = TrajectoryRecorder(
        probes=list(config.probes),
        raster_x=raster,
        metadata={
            "config_hash": config_fingerprint(config),
            "scenario": config.scenario,
            "parameters": p.model_dump(),
            "stimulus_times": stimulus_times,
        },
    )

    record_times = set(_grid_times(step.record_every, step.t_end))
    record_times.add(step.t_end)
    breakpoints = sorted(
        record_times | snapshot_times | set(sig_G.breakpoints(step.t_end)) | set(sig_K.breakpoints(step.t_end))
    )

    logger.info(
        "Starting simulation",
        extra={
            "scenario": config.scenario,
            "n_nodes": grid.n_nodes,
            "dt_hr": step.dt,
            "t_end_hr": step.t_end,
        },
    )
    started = time.perf_counter()

    before = state
    state = _apply_impulses(state, grid, sig_K, -math.inf, 0.0, delta_mode)
    if pending_impulses(sig_K, -math.inf, 0.0):
        recorder.record_event(before, state, grid)

    steps = 0
    t_prev = 0.0
    for target in breakpoints:
        while state.t < target:
            t_next = min(state.t + step.dt, target)
            if target - t_next < LANDING_SLACK * step.dt:
                t_next = target
            state, grid = rk4_step(
                state, t_next - state.t, p, sig_G, sig_K, grid, delta_mode, t_next=t_next
            )
            steps += 1
            if logger.isEnabledFor(logging.DEBUG):
                logger.debug("Step", extra={"t_hr": state.t, "L_mm": state.L})

        if target > t_prev and pending_impulses(sig_K, t_prev, target):
            before = state
            state = _apply_impulses(state, grid, sig_K, t_prev, target, delta_mode)
            recorder.record_event(before, state, grid)
        if target in record_times:
            recorder.record(state, grid)
        if target in snapshot_times:
            recorder.record_snapshot(state, grid)
        t_prev = target

    trajectory = recorder.finish()
    logger.info(
        "Simulation completed",
        extra={
            "steps": steps,
            "final_L_mm": state.L,
            "n_nodes": grid.n_nodes,
            "wall_seconds": round(time.perf_counter() - started, 3),
        },
    )
    return trajectory
