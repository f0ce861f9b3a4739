"""
Spatial Discretization for the Biofilm Electrochemical Signalling Simulator.

The biofilm occupies [0, L] and is sampled on a uniform grid with fixed
spacing dx; as L grows, nodes are appended at the edge. The extracellular
diffusion operator carries a zero-flux mirror at x = 0 and the boundary-layer
flux condition D f_x = (D_fluid / L_b)(far_field - f) at the last node.
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from model import BiofilmState, NodeState
from src.config.settings import GRID_LINE_TOLERANCE, Parameters
from src.exceptions import StateCorruptionError, ValidationError
from src.utils.logging import get_logger


logger = get_logger(__name__)

MIN_NODES: int = 3


def node_count(L: float, dx: float) -> int:
    """Number of grid nodes covering [0, L]: floor(L/dx) + 1."""
    return int(math.floor(L / dx + GRID_LINE_TOLERANCE)) + 1


@dataclass(frozen=True)
class Grid:
    """
    Uniform grid over the current biofilm.

    Attributes:
        dx: Node spacing (mm)
        n_nodes: Number of nodes; node i sits at x = i * dx
        L: Current biofilm length (mm)
    """
    dx: float
    n_nodes: int
    L: float

    def __post_init__(self):
        if not self.dx > 0:
            raise ValidationError(f"node spacing must be positive, got {self.dx}", field="grid.dx")
        if self.n_nodes < MIN_NODES:
            raise ValidationError(
                f"grid needs at least {MIN_NODES} nodes, L = {self.L} mm with dx = {self.dx} mm gives {self.n_nodes}",
                field="grid.initial_L",
            )
        slack = GRID_LINE_TOLERANCE * self.dx
        if not ((self.n_nodes - 1) * self.dx <= self.L + slack and self.L < self.n_nodes * self.dx + slack):
            raise StateCorruptionError(
                f"{self.n_nodes} nodes at dx = {self.dx} do not cover L = {self.L}"
            )

    @classmethod
    def for_length(cls, L: float, dx: float) -> "Grid":
        return cls(dx=dx, n_nodes=node_count(L, dx), L=L)

    @property
    def x(self) -> np.ndarray:
        """Node coordinates (mm)."""
        return np.arange(self.n_nodes) * self.dx

    @property
    def x_last(self) -> float:
        return (self.n_nodes - 1) * self.dx

    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights over the nodes (mm)."""
        w = np.full(self.n_nodes, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w


@dataclass(frozen=True)
class BoundarySpec:
    """
    Exchange with the surrounding fluid at the biofilm edge.

    Attributes:
        D_interior: Diffusivity inside the biofilm (mm^2/hr)
        D_fluid: Diffusivity in the fluid (mm^2/hr); 0 gives a closed edge
        L_b: Boundary-layer width (mm)
        far_field: Long-range fluid concentration (mM)
    """
    D_interior: float
    D_fluid: float
    L_b: float
    far_field: float

    def __post_init__(self):
        if not self.D_interior > 0:
            raise ValidationError(f"interior diffusivity must be positive, got {self.D_interior}")
        if not self.L_b > 0:
            raise ValidationError(f"boundary-layer width must be positive, got {self.L_b}")
        if self.D_fluid < 0 or self.far_field < 0:
            raise ValidationError("fluid diffusivity and far-field concentration must be non-negative")

    @classmethod
    def glutamate(cls, p: Parameters) -> "BoundarySpec":
        return cls(D_interior=p.D_G, D_fluid=p.D_G_fl, L_b=p.L_b, far_field=p.G_0)

    @classmethod
    def potassium(cls, p: Parameters) -> "BoundarySpec":
        return cls(D_interior=p.D_K, D_fluid=p.D_K_fl, L_b=p.L_b, far_field=p.K_0)


def laplacian_with_bcs(field: np.ndarray, g: Grid, b: BoundarySpec) -> np.ndarray:
    """
    Second derivative of a node field with the biofilm boundary conditions (mM/mm^2).

    Node 0 uses the mirror ghost f[-1] = f[1]; the last node uses the ghost
    f[N+1] = f[N-1] + 2 dx D_fluid / (D_interior L_b) (far_field - f[N]).

    Raises:
        StateCorruptionError: On non-finite input
    """
    field = np.asarray(field, dtype=float)
    if field.shape != (g.n_nodes,):
        raise StateCorruptionError(f"field has {field.shape} values, grid has {g.n_nodes} nodes")
    if not np.all(np.isfinite(field)):
        node = int(np.flatnonzero(~np.isfinite(field))[0])
        raise StateCorruptionError(f"non-finite field value at node {node}", node=node)

    inv_dx2 = 1.0 / g.dx ** 2
    out = np.empty_like(field)
    out[1:-1] = (field[:-2] - 2.0 * field[1:-1] + field[2:]) * inv_dx2
    out[0] = (2.0 * field[1] - 2.0 * field[0]) * inv_dx2

    ghost_offset = 2.0 * g.dx * b.D_fluid / (b.D_interior * b.L_b) * (b.far_field - field[-1])
    ghost = field[-2] + ghost_offset
    out[-1] = (field[-2] - 2.0 * field[-1] + ghost) * inv_dx2
    return out


def integrate_over_biofilm(values: np.ndarray, g: Grid, L: Optional[float] = None) -> float:
    """
    Trapezoidal integral of a node field over [0, L].

    The sliver between the last node and L takes the last-node value. ``L``
    defaults to the grid length; the integrator passes the in-stage length.
    """
    values = np.asarray(values, dtype=float)
    length = g.L if L is None else L
    return float(trapezoid(values, dx=g.dx) + (length - g.x_last) * values[-1])


def growth_rate(
    G_i: np.ndarray,
    M_g: np.ndarray,
    g: Grid,
    p: Parameters,
    L: Optional[float] = None,
) -> float:
    """Biofilm elongation rate dL/dt = delta_g * integral of G_i M_g over [0, L] (mm/hr)."""
    return p.delta_g * integrate_over_biofilm(np.asarray(G_i) * np.asarray(M_g), g, L)


def extend_domain(state: BiofilmState, g: Grid) -> tuple[BiofilmState, Grid]:
    """
    Append one node per grid line crossed by the grown length.

    New nodes copy the previous last node; existing values are untouched.

    Raises:
        StateCorruptionError: If L decreased
    """
    if state.L < g.L - GRID_LINE_TOLERANCE * g.dx:
        raise StateCorruptionError(f"biofilm length decreased from {g.L} to {state.L}")

    n_target = node_count(state.L, g.dx)
    if n_target <= g.n_nodes:
        return state, replace(g, L=state.L)

    added = n_target - g.n_nodes
    extended = NodeState(*(np.concatenate([v, np.repeat(v[-1], added)]) for v in state.nodes.values()))
    new_grid = Grid(dx=g.dx, n_nodes=n_target, L=state.L)

    logger.debug(
        "Domain extended",
        extra={"nodes_added": added, "n_nodes": n_target, "L_mm": state.L, "t_hr": state.t},
    )
    return BiofilmState(extended, state.L, state.t), new_grid
