"""Shared fixtures for the simulator test suite."""

import sys
from pathlib import Path
from typing import Any

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from grid import Grid
from model import NodeState, uniform_state
from scenario import ExperimentConfig, config_from_dict
from src.config.settings import Parameters


# Every reaction rate, strength and yield switched off
QUIESCENT_OVERRIDES: dict[str, float] = {
    "delta_G": 0.0,
    "g_K": 0.0,
    "g_L": 0.0,
    "gamma_K": 0.0,
    "gamma_G": 0.0,
    "r_b": 0.0,
    "eta_K": 0.0,
    "alpha": 0.0,
    "beta": 0.0,
    "delta_g": 0.0,
}


@pytest.fixture
def params() -> Parameters:
    return Parameters()


@pytest.fixture
def diffusion_only_params() -> Parameters:
    """Default transport, no reactions and no growth."""
    return Parameters(**QUIESCENT_OVERRIDES)


@pytest.fixture
def frozen_params() -> Parameters:
    """Nothing moves: no reactions, no diffusion."""
    return Parameters(**QUIESCENT_OVERRIDES, D_G=0.0, D_K=0.0)


@pytest.fixture
def initial_node() -> NodeState:
    return NodeState(G_e=30.0, K_e=8.0, G_i=20.0, K_i=300.0, K_ac=9.0, V=-156.0, n=0.1)


@pytest.fixture
def small_grid() -> Grid:
    """11 nodes over [0, 1] mm."""
    return Grid.for_length(1.0, 0.1)


@pytest.fixture
def small_state(initial_node, small_grid):
    return uniform_state(initial_node, small_grid.n_nodes, small_grid.L)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def short_config_data(**sections: Any) -> dict[str, Any]:
    """A 1 mm biofilm run for 0.2 hr, probed at both ends."""
    data: dict[str, Any] = {
        "grid": {"dx": 0.05, "initial_L": 1.0},
        "step": {"dt": 0.001, "t_end": 0.2, "record_every": 0.05},
        "probes": [{"x": 0.0}, {"x": 1.0}],
    }
    data.update(sections)
    return data


@pytest.fixture
def short_config() -> ExperimentConfig:
    return config_from_dict(short_config_data())


@pytest.fixture
def make_config():
    def _make(**sections: Any) -> ExperimentConfig:
        return config_from_dict(short_config_data(**sections))
    return _make
