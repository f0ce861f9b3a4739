"""Tests for the pointwise reaction terms and the state containers."""

import math

import numpy as np
import pytest

from model import (
    BiofilmState,
    NodeDerivative,
    NodeState,
    check_finite,
    gate_opening_activation,
    glutamate_uptake,
    growth_propensity,
    leak_flux,
    node_reaction_rhs,
    potassium_channel_flux,
    pump_rate,
    release_availability,
    reversal_potentials,
    uniform_state,
    uptake_sigmoid,
)
from src.config.settings import Parameters
from src.exceptions import StateCorruptionError


def random_states(rng, p: Parameters, size: int = 1000) -> NodeState:
    return NodeState(
        G_e=rng.uniform(0.0, 60.0, size),
        K_e=rng.uniform(0.0, 100.0, size),
        G_i=rng.uniform(0.0, p.G_m, size),
        K_i=rng.uniform(0.0, 400.0, size),
        K_ac=rng.uniform(0.0, 100.0, size),
        V=rng.uniform(-400.0, 0.0, size),
        n=rng.uniform(0.0, 1.0, size),
    )


def brute_force_rhs(G_e, K_e, G_i, K_i, K_ac, V, n, p: Parameters) -> tuple[float, ...]:
    """Scalar transcription of the model equations, independent of the vectorized code."""
    sigma = 1.0 / (1.0 + math.exp(max(-50.0, min(50.0, V - p.V_t))))
    uptake = p.delta_G * sigma * G_e * max(p.G_m - G_i, 0.0)

    V_K = p.V_K0 + p.delta_K * K_e
    V_L = p.V_L0 + p.delta_L * (K_e - K_ac)
    channel = p.g_K * n ** 4 * (V - V_K)
    leak = p.g_L * (V - V_L)
    pump = max(p.gamma_K * K_e * (p.K_m - K_i), 0.0)
    membrane = p.F * (channel + leak) - pump
    if membrane > 0 and p.K_r > 0:
        membrane *= min(max(K_i / p.K_r, 0.0), 1.0)

    T_G = G_i / (G_i + p.G_u)
    T_V = p.eta_V * (math.tanh(p.gamma_V * (V / p.V_l - 1.0)) + 1.0)
    M_g = T_G / (T_G + T_V) if T_G + T_V > 0 else 0.0

    deficit = max(p.G_m - G_i, 0.0) ** p.m
    activation = p.alpha * deficit / ((p.G_m - p.G_l) ** p.m + deficit)

    return (
        -uptake,
        membrane,
        uptake - p.gamma_G * G_i * (M_g + p.r_b),
        -membrane,
        p.eta_K * (K_e - K_ac),
        -membrane / p.F,
        activation * (1.0 - n) - p.beta * n,
    )


class TestScalarTerms:
    def test_uptake_sigmoid_midpoint(self, params):
        assert uptake_sigmoid(params.V_t, params) == pytest.approx(0.5)

    def test_uptake_sigmoid_default_voltage(self, params):
        assert uptake_sigmoid(-156.0, params) == pytest.approx(1.0 / (1.0 + math.exp(-6.0)), rel=1e-12)
        assert uptake_sigmoid(-156.0, params) == pytest.approx(0.997527, abs=1e-6)

    def test_uptake_sigmoid_clamps_exponent(self, params):
        assert uptake_sigmoid(params.V_t + 100.0, params) == pytest.approx(1.0 / (1.0 + math.exp(50.0)), rel=1e-12)

    def test_glutamate_uptake(self, params):
        assert glutamate_uptake(30.0, params.G_m, -156.0, params) == 0.0
        assert glutamate_uptake(0.0, 10.0, -156.0, params) == 0.0
        assert glutamate_uptake(30.0, 10.0, -156.0, params) == pytest.approx(2992.58, abs=0.01)

    def test_glutamate_uptake_rejects_overfull_cell(self, params):
        with pytest.raises(StateCorruptionError):
            glutamate_uptake(30.0, params.G_m + 1.0, -156.0, params)

    def test_potassium_channel_flux(self, params):
        assert potassium_channel_flux(-156.0, 0.0, -372.0, params) == 0.0
        assert potassium_channel_flux(-156.0, 0.3, -156.0, params) == 0.0
        assert potassium_channel_flux(-156.0, 0.1, -372.0, params) == pytest.approx(3.888, rel=1e-12)

    @pytest.mark.parametrize(
        "V, V_L, expected",
        [(-156.0, -156.0, 0.0), (-156.0, -216.0, 72.0), (-216.0, -156.0, -72.0)],
    )
    def test_leak_flux(self, params, V, V_L, expected):
        assert leak_flux(V, V_L, params) == pytest.approx(expected, rel=1e-12)

    def test_pump_rate(self, params):
        assert pump_rate(8.0, params.K_m, params) == 0.0
        assert pump_rate(8.0, params.K_m + 50.0, params) == 0.0
        assert pump_rate(8.0, 290.0, params) == pytest.approx(2.0, rel=1e-12)

    def test_growth_propensity(self, params):
        assert growth_propensity(0.0, -400.0, params) == 0.0
        assert growth_propensity(20.0, -156.0, params) == pytest.approx(0.5063, abs=1e-4)
        assert growth_propensity(20.0, -250.0, params) == pytest.approx(0.0130, abs=1e-4)

    def test_growth_propensity_zero_over_zero_is_zero(self):
        p = Parameters(eta_V=0.0)
        assert growth_propensity(0.0, -156.0, p) == 0.0

    def test_gate_opening_activation(self, params):
        assert gate_opening_activation(params.G_m, params) == 0.0
        assert gate_opening_activation(params.G_l, params) == pytest.approx(params.alpha / 2)
        assert gate_opening_activation(15.0, params) == pytest.approx(1.0, rel=1e-12)

    def test_reversal_potentials(self, params):
        V_K, V_L = reversal_potentials(8.0, 8.0, params)
        assert V_K == pytest.approx(-372.0)
        assert V_L == pytest.approx(params.V_L0)
        _, V_L = reversal_potentials(8.0, 9.0, params)
        assert V_L == pytest.approx(-216.0)


class TestNodeReactionRhs:
    def test_equilibrium_probe(self, params):
        V = -300.0
        s = NodeState(
            G_e=12.0,
            K_e=V - params.V_K0,
            G_i=params.G_m,
            K_i=params.K_m,
            K_ac=(V - params.V_K0) - (V - params.V_L0) / params.delta_L,
            V=V,
            n=0.0,
        )
        d = node_reaction_rhs(s, params)
        assert d.dV == pytest.approx(0.0, abs=1e-12)
        assert d.dn == pytest.approx(0.0, abs=1e-12)
        assert d.dK_e == pytest.approx(0.0, abs=1e-10)
        assert d.dG_e == pytest.approx(0.0, abs=1e-12)

    def test_default_initial_condition(self, params, initial_node):
        d = node_reaction_rhs(initial_node, params)
        assert d.dG_e == pytest.approx(0.0, abs=1e-12)
        assert d.dK_e == pytest.approx(424.9728, rel=1e-9)
        assert d.dK_i == pytest.approx(-424.9728, rel=1e-9)
        # dV = dK_i / F, so the depolarizing membrane current lowers V here
        assert d.dV == pytest.approx(-75.888, rel=1e-9)
        assert d.dK_ac == pytest.approx(-30.0)

    def test_matches_brute_force(self, params, rng):
        states = random_states(rng, params)
        derivative = node_reaction_rhs(states, params)
        for i in range(len(states.G_e)):
            args = [float(v[i]) for v in states.values()]
            expected = brute_force_rhs(*args, params)
            actual = [float(v[i]) for v in derivative.values()]
            np.testing.assert_allclose(actual, expected, rtol=1e-12, atol=1e-8)

    def test_exchange_antisymmetry(self, params, rng):
        states = random_states(rng, params)
        d = node_reaction_rhs(states, params)
        assert np.all(d.dK_e + d.dK_i == 0.0)

        M_g = growth_propensity(states.G_i, states.V, params)
        consumption = params.gamma_G * states.G_i * (M_g + params.r_b)
        np.testing.assert_allclose(d.dG_e + d.dG_i, -consumption, rtol=1e-12, atol=1e-9)

    def test_voltage_follows_intracellular_potassium(self, params, rng):
        d = node_reaction_rhs(random_states(rng, params), params)
        np.testing.assert_allclose(d.dV * params.F, d.dK_i, rtol=1e-14, atol=1e-12)

    def test_gate_field_points_inward(self, params, rng):
        G_i = rng.uniform(0.0, params.G_m, 200)
        at_zero = node_reaction_rhs(
            NodeState(G_e=30.0, K_e=8.0, G_i=G_i, K_i=300.0, K_ac=9.0, V=-156.0, n=0.0), params
        )
        at_one = node_reaction_rhs(
            NodeState(G_e=30.0, K_e=8.0, G_i=G_i, K_i=300.0, K_ac=9.0, V=-156.0, n=1.0), params
        )
        assert np.all(at_zero.dn >= 0.0)
        assert np.all(at_one.dn <= 0.0)

    def test_release_fades_with_intracellular_reserve(self, params):
        K_i = np.array([-1.0, 0.0, params.K_r / 2, params.K_r, 300.0])
        np.testing.assert_allclose(release_availability(K_i, params), [0.0, 0.0, 0.5, 1.0, 1.0])
        assert release_availability(0.0, params.model_copy(update={"K_r": 0.0})) == 1.0

    def test_depleted_cell_releases_nothing(self, params):
        # Wide-open gate against a low exterior: strongly outward
        s = NodeState(G_e=0.0, K_e=8.0, G_i=0.0, K_i=0.0, K_ac=8.0, V=-200.0, n=0.8)
        d = node_reaction_rhs(s, params)
        assert d.dK_i == 0.0
        assert d.dV == 0.0

        unthrottled = node_reaction_rhs(s, params.model_copy(update={"K_r": 0.0}))
        assert unthrottled.dK_i < 0.0

    def test_inward_flow_is_not_throttled(self, params):
        # Pump dominates a closed gate at low K_i
        s = NodeState(G_e=0.0, K_e=50.0, G_i=0.0, K_i=5.0, K_ac=50.0, V=-156.0, n=0.0)
        throttled = node_reaction_rhs(s, params)
        free = node_reaction_rhs(s, params.model_copy(update={"K_r": 0.0}))
        assert throttled.dK_i > 0.0
        assert throttled.dK_i == free.dK_i


class TestRangesAndMonotonicity:
    def test_ranges(self, params, rng):
        s = random_states(rng, params)
        sigma = uptake_sigmoid(s.V, params)
        M_g = growth_propensity(s.G_i, s.V, params)
        activation = gate_opening_activation(s.G_i, params)
        # exp underflows against 1 for V far below V_t, so the closed upper bound is what floats give
        assert np.all((sigma > 0) & (sigma <= 1))
        assert np.all((M_g >= 0) & (M_g <= 1))
        assert np.all(pump_rate(s.K_e, s.K_i, params) >= 0)
        assert np.all((activation >= 0) & (activation < params.alpha))

    def test_sigmoid_strictly_inside_unit_interval_near_threshold(self, params, rng):
        V = rng.uniform(params.V_t - 30.0, params.V_t + 30.0, 1000)
        sigma = uptake_sigmoid(V, params)
        assert np.all((sigma > 0) & (sigma < 1))

    def test_growth_propensity_monotone(self, params):
        G_i = np.linspace(0.0, params.G_m, 400)
        assert np.all(np.diff(growth_propensity(G_i, -156.0, params)) >= -1e-15)
        V = np.linspace(-400.0, 0.0, 400)
        assert np.all(np.diff(growth_propensity(15.0, V, params)) >= -1e-15)

    def test_gate_activation_monotone(self, params):
        G_i = np.linspace(0.0, params.G_m, 400)
        assert np.all(np.diff(gate_opening_activation(G_i, params)) <= 1e-15)


class TestFiniteDifferences:
    STEP = 1e-5

    def central(self, f, x):
        return (f(x + self.STEP) - f(x - self.STEP)) / (2 * self.STEP)

    @pytest.mark.parametrize("V", [-158.0, -156.0, -150.0, -145.0])
    def test_sigmoid_derivative(self, params, V):
        s = uptake_sigmoid(V, params)
        analytic = -s * (1.0 - s)
        numeric = self.central(lambda v: uptake_sigmoid(v, params), V)
        assert numeric == pytest.approx(analytic, rel=1e-6)

    @pytest.mark.parametrize("G_i", [2.0, 10.0, 15.0, 19.0])
    def test_hill_derivative(self, params, G_i):
        h = (params.G_m - params.G_l) ** params.m
        u = (params.G_m - G_i) ** params.m
        du = -params.m * (params.G_m - G_i) ** (params.m - 1)
        analytic = params.alpha * h * du / (h + u) ** 2
        numeric = self.central(lambda g: gate_opening_activation(g, params), G_i)
        assert numeric == pytest.approx(analytic, rel=1e-6)

    @pytest.mark.parametrize("V", [-190.0, -176.0, -170.0])
    def test_tanh_derivative(self, params, V):
        def T_V(v):
            return params.eta_V * (math.tanh(params.gamma_V * (v / params.V_l - 1.0)) + 1.0)

        arg = params.gamma_V * (V / params.V_l - 1.0)
        analytic = params.eta_V * (1.0 - math.tanh(arg) ** 2) * params.gamma_V / params.V_l
        assert self.central(T_V, V) == pytest.approx(analytic, rel=1e-6)


class TestStateContainers:
    def test_vector_round_trip_is_exact(self, small_state):
        vector = small_state.to_vector()
        rebuilt = BiofilmState.from_vector(vector, small_state.t)
        np.testing.assert_array_equal(rebuilt.to_vector(), vector)
        assert rebuilt.L == small_state.L

    def test_node_view(self, small_state, initial_node):
        assert small_state.node(3) == initial_node
        assert len(list(small_state)) == small_state.n_nodes

    def test_rejects_ragged_fields(self, initial_node):
        nodes = NodeState(*(np.ones(3) for _ in range(6)), np.ones(4))
        with pytest.raises(StateCorruptionError):
            BiofilmState(nodes, L=1.0)

    def test_rejects_non_positive_length(self, initial_node):
        with pytest.raises(StateCorruptionError):
            uniform_state(initial_node, 3, 0.0)

    def test_check_finite_names_field_and_node(self):
        d = NodeDerivative(
            dG_e=np.zeros(4), dK_e=np.zeros(4), dG_i=np.zeros(4), dK_i=np.zeros(4),
            dK_ac=np.zeros(4), dV=np.array([0.0, 0.0, np.nan, 0.0]), dn=np.zeros(4),
        )
        with pytest.raises(StateCorruptionError) as excinfo:
            check_finite(d)
        assert excinfo.value.field == "dV"
        assert excinfo.value.node == 2
