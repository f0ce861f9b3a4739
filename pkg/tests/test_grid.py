"""Tests for the spatial discretization."""

import numpy as np
import pytest

from grid import (
    BoundarySpec,
    Grid,
    extend_domain,
    growth_rate,
    integrate_over_biofilm,
    laplacian_with_bcs,
    node_count,
)
from model import BiofilmState, NodeState, uniform_state
from src.exceptions import StateCorruptionError, ValidationError


def potassium_boundary(D_fluid: float = 4.97) -> BoundarySpec:
    return BoundarySpec(D_interior=0.497, D_fluid=D_fluid, L_b=0.5, far_field=8.0)


class TestGrid:
    @pytest.mark.parametrize(
        "L, dx, expected",
        [(1.0, 0.1, 11), (0.12, 0.01, 13), (0.119, 0.01, 12), (0.121, 0.01, 13), (12.0, 0.05, 241)],
    )
    def test_node_count(self, L, dx, expected):
        assert node_count(L, dx) == expected

    def test_invariant_holds_for_built_grids(self):
        g = Grid.for_length(0.37, 0.05)
        assert (g.n_nodes - 1) * g.dx <= g.L < g.n_nodes * g.dx

    def test_too_few_nodes(self):
        with pytest.raises(ValidationError) as excinfo:
            Grid.for_length(0.05, 0.05)
        assert excinfo.value.field == "grid.initial_L"

    def test_non_positive_spacing(self):
        with pytest.raises(ValidationError):
            Grid(dx=0.0, n_nodes=5, L=1.0)

    def test_inconsistent_node_count(self):
        with pytest.raises(StateCorruptionError):
            Grid(dx=0.1, n_nodes=5, L=1.0)

    def test_trapezoid_weights(self, small_grid):
        w = small_grid.weights()
        assert w[0] == w[-1] == pytest.approx(0.05)
        assert w.sum() == pytest.approx(small_grid.x_last)


class TestLaplacian:
    def test_far_field_uniform_is_zero(self, small_grid):
        field = np.full(small_grid.n_nodes, 8.0)
        np.testing.assert_array_equal(laplacian_with_bcs(field, small_grid, potassium_boundary()), 0.0)

    def test_quadratic_interior_is_exact(self):
        g = Grid.for_length(1.0, 0.1)
        lap = laplacian_with_bcs(g.x ** 2, g, potassium_boundary())
        np.testing.assert_allclose(lap[1:-1], 2.0, rtol=1e-9)

    def test_boundary_layer_ghost(self, small_grid):
        field = np.full(small_grid.n_nodes, 7.0)
        lap = laplacian_with_bcs(field, small_grid, potassium_boundary())
        assert lap[-1] == pytest.approx(400.0, rel=1e-12)
        np.testing.assert_array_equal(lap[:-1], 0.0)

    def test_zero_flux_conservation(self, small_grid, rng):
        closed = potassium_boundary(D_fluid=0.0)
        w = small_grid.weights()
        for _ in range(20):
            field = rng.uniform(0.0, 10.0, small_grid.n_nodes)
            lap = laplacian_with_bcs(field, small_grid, closed)
            assert abs(np.dot(w, lap)) <= 1e-12 * np.sum(np.abs(w * lap))

    def test_weighted_sum_equals_boundary_flux(self, small_grid, rng):
        b = potassium_boundary()
        field = rng.uniform(0.0, 10.0, small_grid.n_nodes)
        total = b.D_interior * np.dot(small_grid.weights(), laplacian_with_bcs(field, small_grid, b))
        assert total == pytest.approx(b.D_fluid / b.L_b * (b.far_field - field[-1]), rel=1e-10)

    def test_interior_stencil_symmetry(self, small_grid, rng):
        field = rng.uniform(0.0, 10.0, small_grid.n_nodes)
        swapped = field.copy()
        swapped[3], swapped[5] = field[5], field[3]
        b = potassium_boundary()
        assert laplacian_with_bcs(field, small_grid, b)[4] == pytest.approx(
            laplacian_with_bcs(swapped, small_grid, b)[4], rel=1e-12, abs=1e-9
        )

    def test_second_order_convergence(self):
        errors = []
        for dx in (0.1, 0.05, 0.025):
            g = Grid.for_length(1.0, dx)
            lap = laplacian_with_bcs(np.sin(g.x), g, potassium_boundary())
            errors.append(np.max(np.abs(lap[1:-1] + np.sin(g.x[1:-1]))))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(orders >= 1.9)

    def test_rejects_non_finite(self, small_grid):
        field = np.full(small_grid.n_nodes, 8.0)
        field[4] = np.inf
        with pytest.raises(StateCorruptionError) as excinfo:
            laplacian_with_bcs(field, small_grid, potassium_boundary())
        assert excinfo.value.node == 4

    def test_rejects_wrong_length(self, small_grid):
        with pytest.raises(StateCorruptionError):
            laplacian_with_bcs(np.zeros(small_grid.n_nodes + 1), small_grid, potassium_boundary())


class TestGrowthRate:
    def test_zero_propensity(self, small_grid, params):
        G_i = np.full(small_grid.n_nodes, 20.0)
        assert growth_rate(G_i, np.zeros(small_grid.n_nodes), small_grid, params) == 0.0

    def test_constant_integrand(self, params):
        g = Grid.for_length(0.12, 0.01)
        rate = growth_rate(np.full(g.n_nodes, 20.0), np.full(g.n_nodes, 0.5), g, params)
        assert rate == pytest.approx(0.009, rel=1e-12)

    def test_linear_integrand_is_exact(self, small_grid, params):
        c = 3.0
        G_i = c * small_grid.x / small_grid.L
        rate = growth_rate(G_i, np.ones(small_grid.n_nodes), small_grid, params)
        assert rate == pytest.approx(params.delta_g * c * small_grid.L / 2, rel=1e-12)

    def test_sliver_beyond_last_node(self):
        g = Grid(dx=0.1, n_nodes=11, L=1.05)
        assert integrate_over_biofilm(np.ones(11), g) == pytest.approx(1.05)


class TestExtendDomain:
    def state_on(self, g: Grid, L: float, rng) -> BiofilmState:
        nodes = NodeState(*(rng.uniform(1.0, 2.0, g.n_nodes) for _ in range(7)))
        return BiofilmState(nodes, L)

    def test_single_crossing(self, rng):
        g = Grid(dx=0.01, n_nodes=12, L=0.119)
        state = self.state_on(g, 0.121, rng)
        extended, new_grid = extend_domain(state, g)
        assert new_grid.n_nodes == 13
        assert new_grid.L == 0.121
        assert extended.node(12) == state.node(11)
        for before, after in zip(state.nodes.values(), extended.nodes.values()):
            np.testing.assert_array_equal(after[:12], before)

    def test_unchanged_length_is_identity(self, rng):
        g = Grid(dx=0.01, n_nodes=12, L=0.119)
        state = self.state_on(g, 0.119, rng)
        extended, new_grid = extend_domain(state, g)
        assert new_grid == g
        np.testing.assert_array_equal(extended.to_vector(), state.to_vector())

    def test_several_crossings(self, rng):
        g = Grid(dx=0.01, n_nodes=12, L=0.11)
        state = self.state_on(g, 0.11 + 3.5 * 0.01, rng)
        extended, new_grid = extend_domain(state, g)
        assert new_grid.n_nodes == 15
        assert extended.n_nodes == 15
        for i in (12, 13, 14):
            assert extended.node(i) == state.node(11)

    def test_shrinking_is_rejected(self, initial_node):
        g = Grid.for_length(1.0, 0.1)
        state = uniform_state(initial_node, g.n_nodes, 0.9)
        with pytest.raises(StateCorruptionError):
            extend_domain(state, g)
