import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beliefflow.engine import (NO_CONTROL, BeliefState, ControlStrategy, ExactSolver,
                               PrivateBeliefDistribution, beliefs_from_json, beliefs_to_json,
                               control_power_exact, control_power_expected, converge_exact,
                               converge_iterative, initial_state, residual, step)
from beliefflow.errors import ConfigError, NonConvergenceError
from beliefflow.graph import Graph
from oracles import fixed_point_dense, graphs, random_control, random_graph

TRI_W = np.array([0.9, -0.3, 0.0])


class TestStep:
    def test_triangle(self, triangle):
        s = step(BeliefState(TRI_W.copy(), TRI_W.copy()), triangle)
        np.testing.assert_allclose(s.b, [0.2, 0.2, 0.2])
        assert s.t == 1

    def test_path_control(self, path3):
        ctl = ControlStrategy.uniform([1], 1.0)
        s = step(initial_state(path3, np.zeros(3), ctl), path3, ctl)
        np.testing.assert_allclose(s.b, [0.5, 1.0, 0.5])

    def test_all_controlled(self, triangle):
        ctl = ControlStrategy((0, 1, 2), (0.3, -0.5, 1.0))
        s = initial_state(triangle, TRI_W, ctl)
        for _ in range(5):
            s = step(s, triangle, ctl)
            np.testing.assert_array_equal(s.b, [0.3, -0.5, 1.0])

    def test_dimension_mismatch(self, triangle):
        with pytest.raises(ConfigError):
            step(BeliefState(np.zeros(2), np.zeros(2)), triangle)


class TestStrategy:
    def test_validation(self):
        with pytest.raises(ConfigError):
            ControlStrategy((0, 1), (1.0,))
        with pytest.raises(ConfigError):
            ControlStrategy((0, 0), (1.0, 1.0))
        with pytest.raises(ConfigError):
            ControlStrategy((0,), (1.5,))

    def test_out_of_range(self, triangle):
        with pytest.raises(ConfigError):
            converge_exact(triangle, np.zeros(3), ControlStrategy.uniform([5]))


class TestConverge:
    def test_triangle_iterative(self, triangle):
        b, steps = converge_iterative(triangle, TRI_W)
        np.testing.assert_allclose(b, [0.375, 0.075, 0.15], atol=1e-8)
        assert steps > 0

    def test_triangle_exact(self, triangle):
        np.testing.assert_allclose(converge_exact(triangle, TRI_W), [0.375, 0.075, 0.15], atol=1e-12)

    def test_path_control_exact(self, path3):
        b = converge_exact(path3, np.zeros(3), ControlStrategy.uniform([1], 1.0))
        np.testing.assert_allclose(b, [0.5, 1.0, 0.5], atol=1e-12)

    def test_constant_w(self, rng):
        g = random_graph(rng, 30, 0.3)
        b, _ = converge_iterative(g, np.full(30, 0.4))
        np.testing.assert_allclose(b, 0.4, atol=1e-8)

    def test_isolated_node_keeps_private(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2)])
        w = np.array([0.1, 0.2, 0.3, -0.7])
        assert converge_exact(g, w)[3] == pytest.approx(-0.7)

    def test_non_convergence_carries_residual(self, rng):
        g = random_graph(rng, 30, 0.3)
        with pytest.raises(NonConvergenceError) as exc:
            converge_iterative(g, rng.uniform(-1, 1, 30), t_max=2)
        assert exc.value.residual > 0

    def test_sparse_path_matches_dense(self, rng):
        g = random_graph(rng, 80, 0.05)
        nodes, beliefs = random_control(rng, 80)
        ctl = ControlStrategy(nodes, beliefs)
        w = rng.uniform(-1, 1, (3, 80))
        np.testing.assert_allclose(ExactSolver(g, ctl, sparse=True).solve(w),
                                   ExactSolver(g, ctl, sparse=False).solve(w), atol=1e-12)

    def test_exact_against_plain_solve(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 60))
            g = random_graph(rng, n, rng.uniform(0.02, 0.5))
            nodes, beliefs = random_control(rng, n)
            w = rng.uniform(-1, 1, n)
            np.testing.assert_allclose(converge_exact(g, w, ControlStrategy(nodes, beliefs)),
                                       fixed_point_dense(g, w, nodes, beliefs), atol=1e-10)

    @given(graphs(min_n=1, max_n=25), st.integers(0, 2**31))
    def test_iterative_properties(self, g, seed):
        rng = np.random.default_rng(seed)
        nodes, beliefs = random_control(rng, g.n)
        ctl = ControlStrategy(nodes, beliefs)
        w = rng.uniform(-1, 1, g.n)
        exact = converge_exact(g, w, ctl)
        trace = []

        def watch(state):
            # boundedness and pinning at every step
            assert np.all(np.abs(state.b) <= 1 + 1e-12)
            np.testing.assert_array_equal(state.b[nodes], beliefs)
            trace.append(float(np.max(np.abs(state.b - exact))) if g.n else 0.0)

        b, _ = converge_iterative(g, w, ctl, callback=watch)
        np.testing.assert_allclose(b, exact, atol=1e-8)
        # monotone contraction toward the fixed point (up to rounding)
        assert all(later <= earlier + 1e-12 for earlier, later in zip(trace, trace[1:]))
        assert residual(g, exact, w, ctl) <= 1e-10


class TestControlPower:
    def test_path_control_constant_zero(self, path3):
        est = control_power_exact(path3, PrivateBeliefDistribution.constant(0.0),
                                  ControlStrategy.uniform([1], 1.0))
        assert est.mean == pytest.approx(2 / 3)
        assert est.n_samples == 1 and est.stderr == 0.0

    def test_pinned_private_variant(self, path3):
        est = control_power_exact(path3, PrivateBeliefDistribution.constant(0.0),
                                  ControlStrategy.uniform([1], 1.0), pin_private=True)
        assert est.mean == pytest.approx(1 / 3)

    def test_no_control_zero(self, triangle):
        est = control_power_exact(triangle, PrivateBeliefDistribution.constant(0.0))
        assert est.mean == 0.0

    def test_all_controlled(self, triangle):
        est = control_power_exact(triangle, PrivateBeliefDistribution.constant(0.0),
                                  ControlStrategy.uniform([0, 1, 2], 1.0))
        assert est.mean == pytest.approx(1.0)

    def test_signed_and_absolute(self, path3):
        est = control_power_exact(path3, PrivateBeliefDistribution.constant(0.0),
                                  ControlStrategy.uniform([1], -1.0))
        assert est.mean == pytest.approx(-2 / 3)
        assert est.abs_mean == pytest.approx(2 / 3)

    def test_monte_carlo_matches_expectation(self, rng):
        g = random_graph(rng, 40, 0.1)
        ctl = ControlStrategy.uniform([0, 1, 2], 1.0)
        dist = PrivateBeliefDistribution("custom", sampler=lambda r, n: r.uniform(-0.5, 1.0, n),
                                         mean=0.25)
        est = control_power_exact(g, dist, ctl, n_samples=2000, seed=3)
        expect = control_power_expected(g, dist, ctl)
        assert abs(est.mean - expect) < 4 * est.stderr

    def test_seeded(self, triangle):
        a = control_power_exact(triangle, PrivateBeliefDistribution.uniform(), n_samples=20, seed=4)
        b = control_power_exact(triangle, PrivateBeliefDistribution.uniform(), n_samples=20, seed=4)
        assert a.mean == b.mean


def test_beliefs_json_roundtrip(path3):
    ctl = ControlStrategy.uniform([1], 1.0)
    b = converge_exact(path3, np.zeros(3), ctl)
    text = beliefs_to_json(np.zeros(3), ctl, b)
    assert set(json.loads(text)) == {"w", "control_set", "controlled_beliefs", "b_inf"}
    w2, ctl2, b2 = beliefs_from_json(text)
    assert ctl2 == ctl
    np.testing.assert_array_equal(b2, b)
    np.testing.assert_array_equal(w2, np.zeros(3))


def test_no_control_singleton():
    g = Graph.from_edges(1, [])
    np.testing.assert_allclose(converge_exact(g, [0.3], NO_CONTROL), [0.3])
