"""
Model Core for the Biofilm Electrochemical Signalling Simulator.

This module holds the state types of the biofilm model and evaluates every
pointwise (non-spatial) reaction term: glutamate uptake, potassium channel,
leak and pump fluxes, growth propensity, gating kinetics and acclimation.

Every operation accepts scalars or numpy arrays of node values and
broadcasts, so the integrator evaluates the whole grid in one call.
"""

from dataclasses import dataclass, fields, replace
from typing import Iterator

import numpy as np

from src.config.settings import (
    CONCENTRATION_TOLERANCE,
    EXP_CLAMP,
    Parameters,
)
from src.exceptions import StateCorruptionError
from src.types import FieldValues, StateField


STATE_FIELDS: tuple[str, ...] = tuple(f.value for f in StateField)


@dataclass(frozen=True)
class NodeState:
    """
    Unknowns of one node (or, with array fields, of every node).

    Attributes:
        G_e: Extracellular glutamate (mM)
        K_e: Extracellular potassium (mM)
        G_i: Intracellular glutamate (mM)
        K_i: Intracellular potassium (mM)
        K_ac: Acclimated potassium level (mM)
        V: Membrane potential (mV)
        n: Potassium gate openness (dimensionless)
    """
    G_e: FieldValues
    K_e: FieldValues
    G_i: FieldValues
    K_i: FieldValues
    K_ac: FieldValues
    V: FieldValues
    n: FieldValues

    def values(self) -> tuple[FieldValues, ...]:
        return tuple(getattr(self, name) for name in STATE_FIELDS)


@dataclass(frozen=True)
class NodeDerivative:
    """Time derivatives of a NodeState; dG_e and dK_e hold the reaction part only."""
    dG_e: FieldValues
    dK_e: FieldValues
    dG_i: FieldValues
    dK_i: FieldValues
    dK_ac: FieldValues
    dV: FieldValues
    dn: FieldValues

    def values(self) -> tuple[FieldValues, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class BiofilmState:
    """
    Full simulation state: per-node fields over the grid 0..L.

    ``nodes`` stores one numpy array per field; ``node(i)`` and iteration
    give the ordered per-node view.
    """
    nodes: NodeState
    L: float
    t: float = 0.0

    def __post_init__(self):
        sizes = {np.shape(v) for v in self.nodes.values()}
        if len(sizes) != 1 or len(next(iter(sizes))) != 1:
            raise StateCorruptionError(f"state fields must be 1-D arrays of equal length, got {sizes}")
        if not self.L > 0:
            raise StateCorruptionError(f"biofilm length must be positive, got {self.L}")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes.G_e)

    def __len__(self) -> int:
        return self.n_nodes

    def node(self, index: int) -> NodeState:
        """Scalar view of one node."""
        return NodeState(*(float(v[index]) for v in self.nodes.values()))

    def __iter__(self) -> Iterator[NodeState]:
        return (self.node(i) for i in range(self.n_nodes))

    def field(self, name: str) -> np.ndarray:
        return getattr(self.nodes, StateField(name).value)

    def to_vector(self) -> np.ndarray:
        """Flatten the fields and L into one vector (field-major, L last)."""
        return np.concatenate([*self.nodes.values(), [self.L]])

    @classmethod
    def from_vector(cls, vector: np.ndarray, t: float) -> "BiofilmState":
        """Inverse of ``to_vector``."""
        n_nodes = (len(vector) - 1) // len(STATE_FIELDS)
        parts = vector[:-1].reshape(len(STATE_FIELDS), n_nodes)
        return cls(NodeState(*(part.copy() for part in parts)), float(vector[-1]), t)

    def with_nodes(self, **changes: np.ndarray) -> "BiofilmState":
        return replace(self, nodes=replace(self.nodes, **changes))


def uniform_state(initial: NodeState, n_nodes: int, L: float, t: float = 0.0) -> BiofilmState:
    """Spatially uniform state built from scalar node values."""
    arrays = (np.full(n_nodes, float(v)) for v in initial.values())
    return BiofilmState(NodeState(*arrays), L, t)


# =============================================================================
# POINTWISE REACTION TERMS
# =============================================================================

def _check_glutamate_capacity(G_i: FieldValues, p: Parameters) -> None:
    excess = np.asarray(G_i) - p.G_m
    if np.any(excess > CONCENTRATION_TOLERANCE):
        raise StateCorruptionError(
            f"intracellular glutamate exceeds G_m = {p.G_m} by {float(np.max(excess)):.3g} mM",
            field=StateField.G_I.value,
            node=int(np.argmax(excess)) if np.ndim(excess) else None,
        )


def uptake_sigmoid(V: FieldValues, p: Parameters) -> FieldValues:
    """Voltage modulation of glutamate uptake, 1/(1 + exp(V - V_t)), in (0, 1)."""
    return 1.0 / (1.0 + np.exp(np.clip(V - p.V_t, -EXP_CLAMP, EXP_CLAMP)))


def glutamate_uptake(G_e: FieldValues, G_i: FieldValues, V: FieldValues, p: Parameters) -> FieldValues:
    """
    Glutamate moved from the exterior into the cell (mM/hr).

    Raises:
        StateCorruptionError: If G_i exceeds G_m beyond tolerance
    """
    _check_glutamate_capacity(G_i, p)
    return p.delta_G * uptake_sigmoid(V, p) * G_e * np.maximum(p.G_m - G_i, 0.0)


def potassium_channel_flux(V: FieldValues, n: FieldValues, V_K: FieldValues, p: Parameters) -> FieldValues:
    """Hodgkin-Huxley potassium channel term g_K n^4 (V - V_K) (mV/hr)."""
    return p.g_K * n ** 4 * (V - V_K)


def leak_flux(V: FieldValues, V_L: FieldValues, p: Parameters) -> FieldValues:
    """Leak channel term g_L (V - V_L) (mV/hr)."""
    return p.g_L * (V - V_L)


def pump_rate(K_e: FieldValues, K_i: FieldValues, p: Parameters) -> FieldValues:
    """Potassium pumped into the cell, never negative (mM/hr)."""
    return np.maximum(p.gamma_K * K_e * (p.K_m - K_i), 0.0)


def growth_propensity(G_i: FieldValues, V: FieldValues, p: Parameters) -> FieldValues:
    """
    Growth propensity M_g = T_G / (T_G + T_V) in [0, 1].

    T_G = G_i / (G_i + G_u) is the glutamate sufficiency term and
    T_V = eta_V (tanh(gamma_V (V / V_l - 1)) + 1) the hyperpolarization
    penalty. The 0/0 limit (no glutamate, T_V = 0) is defined as 0.
    """
    G_i = np.asarray(G_i, dtype=float)
    hill_denominator = G_i + p.G_u
    T_G = np.divide(G_i, hill_denominator, out=np.zeros_like(hill_denominator), where=hill_denominator > 0)
    argument = np.clip(p.gamma_V * (np.asarray(V) / p.V_l - 1.0), -EXP_CLAMP, EXP_CLAMP)
    T_V = p.eta_V * (np.tanh(argument) + 1.0)
    total = np.asarray(T_G + T_V, dtype=float)
    result = np.divide(T_G, total, out=np.zeros(total.shape), where=total > 0)
    return float(result) if result.ndim == 0 else result


def gate_opening_activation(G_i: FieldValues, p: Parameters) -> FieldValues:
    """
    Glutamate-starvation drive of the potassium gate (1/hr), in [0, alpha).

    Raises:
        StateCorruptionError: If G_i exceeds G_m beyond tolerance
    """
    _check_glutamate_capacity(G_i, p)
    deficit = np.maximum(p.G_m - np.asarray(G_i, dtype=float), 0.0) ** p.m
    half_saturation = (p.G_m - p.G_l) ** p.m
    result = p.alpha * deficit / (half_saturation + deficit)
    return float(result) if np.ndim(result) == 0 else result


def release_availability(K_i: FieldValues, p: Parameters) -> FieldValues:
    """
    Share of a net potassium release the cell can sustain, min(K_i / K_r, 1).

    Release fades linearly once the intracellular reserve drops below K_r,
    so a cell never exports potassium it does not hold. K_r = 0 disables
    the throttle.
    """
    if p.K_r <= 0:
        return np.ones_like(np.asarray(K_i, dtype=float)) if np.ndim(K_i) else 1.0
    result = np.clip(np.asarray(K_i, dtype=float) / p.K_r, 0.0, 1.0)
    return float(result) if result.ndim == 0 else result


def reversal_potentials(K_e: FieldValues, K_ac: FieldValues, p: Parameters) -> tuple[FieldValues, FieldValues]:
    """Potassium and leak reversal potentials (V_K, V_L) in mV."""
    V_K = p.V_K0 + p.delta_K * K_e
    V_L = p.V_L0 + p.delta_L * (K_e - K_ac)
    return V_K, V_L


def node_reaction_rhs(s: NodeState, p: Parameters) -> NodeDerivative:
    """
    Reaction part of every node equation.

    The membrane exchange terms enter the extracellular and intracellular
    equations as one expression with opposite signs, so dK_e + dK_i == 0
    and the uptake parts of dG_e + dG_i cancel exactly; dV is dK_i / F.
    A net outward flow is scaled by the intracellular reserve
    (``release_availability``); inward flow is never throttled.

    Raises:
        StateCorruptionError: On a non-finite derivative (names the field)
    """
    uptake = glutamate_uptake(s.G_e, s.G_i, s.V, p)
    V_K, V_L = reversal_potentials(s.K_e, s.K_ac, p)
    channel = potassium_channel_flux(s.V, s.n, V_K, p)
    leak = leak_flux(s.V, V_L, p)
    pump = pump_rate(s.K_e, s.K_i, p)
    M_g = growth_propensity(s.G_i, s.V, p)

    membrane = p.F * (channel + leak) - pump
    if p.K_r > 0:
        membrane = np.where(membrane > 0, membrane * release_availability(s.K_i, p), membrane)
        if np.ndim(membrane) == 0:
            membrane = float(membrane)
    dK_i = -membrane

    derivative = NodeDerivative(
        dG_e=-uptake,
        dK_e=membrane,
        dG_i=uptake - p.gamma_G * s.G_i * (M_g + p.r_b),
        dK_i=dK_i,
        dK_ac=p.eta_K * (s.K_e - s.K_ac),
        dV=dK_i / p.F,
        dn=gate_opening_activation(s.G_i, p) * (1.0 - s.n) - p.beta * s.n,
    )
    check_finite(derivative)
    return derivative


def check_finite(derivative: NodeDerivative) -> None:
    """Raise StateCorruptionError naming the first non-finite field and node."""
    for f in fields(derivative):
        values = np.asarray(getattr(derivative, f.name))
        bad = ~np.isfinite(values)
        if np.any(bad):
            node = int(np.flatnonzero(bad)[0]) if values.ndim else None
            where = f" at node {node}" if node is not None else ""
            raise StateCorruptionError(f"non-finite {f.name}{where}", field=f.name, node=node)
