import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kuracert.graph import make_topology
from kuracert.state import (center_phases, deviations, edge_difference_sum, energy,
                            is_centered, lemma1_sandwich, max_phase_spread, sigma_norm)

from conftest import random_connected_graph

vectors = st.lists(st.floats(-20, 20), min_size=2, max_size=12).map(np.array)


def test_center_examples():
    assert np.allclose(center_phases([1, 2, 3]), [-1, 0, 1])
    assert np.allclose(center_phases([math.pi, 0]), [math.pi / 2, -math.pi / 2])
    x = np.array([-0.5, 0.25, 0.25])
    assert np.array_equal(center_phases(x), x)


def test_center_rejects_short_input():
    with pytest.raises(ValueError):
        center_phases([1.0])


@given(vectors)
@settings(max_examples=200, deadline=None)
def test_center_properties(x):
    c = center_phases(x)
    assert is_centered(c)
    assert np.allclose(center_phases(c), c, atol=1e-12)
    assert np.allclose(np.subtract.outer(c, c), np.subtract.outer(x, x), atol=1e-12)
    assert energy(c) <= energy(x) + 1e-9


def test_deviations_examples():
    f = deviations([0, 1])
    assert np.allclose(f.dev, [-0.5, 0.5]) and f.wbar == 0.5
    assert np.all(deviations([2.0, 2.0, 2.0]).dev == 0)
    assert np.allclose(deviations([1, 2, 3]).dev, [-1, 0, 1])


@given(vectors)
@settings(max_examples=200, deadline=None)
def test_deviation_invariants(w):
    f = deviations(w)
    assert abs(f.dev.sum()) <= 1e-9 * f.n * max(1.0, np.abs(w).max())
    assert np.allclose(f.dev + f.wbar, w, atol=1e-12)


def test_scaled_frequencies():
    f = deviations([0.1, 0.4, 0.9])
    assert np.allclose(f.scaled(3.0).dev, 3.0 * f.dev)


def test_energy_examples():
    assert energy(np.zeros(4)) == 0
    assert energy(np.array([1, -1, 0])) == 2
    D = math.pi / 2
    assert energy(np.array([D / 2, -D / 2])) == pytest.approx(math.pi ** 2 / 8)


def test_sigma_examples():
    assert sigma_norm(deviations([3, 3, 3])) == 0
    assert sigma_norm(deviations([0, 1])) == pytest.approx(math.sqrt(0.5))
    assert sigma_norm(deviations([1, 2, 3])) == pytest.approx(math.sqrt(2))


class TestSpread:
    def test_simple(self):
        s = max_phase_spread(np.array([-1.0, 0.0, 1.0]))
        assert s.D == 2 and s.argmax == (3,) and s.argmin == (1,)

    def test_constant(self):
        s = max_phase_spread(np.full(4, 0.7))
        assert s.D == 0 and s.argmax == s.argmin == (1, 2, 3, 4)

    def test_ties(self):
        s = max_phase_spread(np.array([1.0, 1.0, -2.0]))
        assert s.D == 3 and s.argmax == (1, 2) and s.argmin == (3,)

    def test_near_tie_within_tolerance(self):
        s = max_phase_spread(np.array([1.0, 1.0 - 5e-10, 0.0]))
        assert s.argmax == (1, 2)

    @given(vectors, st.floats(-50, 50))
    @settings(max_examples=200, deadline=None)
    def test_shift_invariance(self, x, c):
        assert max_phase_spread(x + c).D == pytest.approx(max_phase_spread(x).D, abs=1e-9)


class TestSandwich:
    def test_complete_graph_equality(self):
        lo, mid, hi = lemma1_sandwich(make_topology("complete", 3), np.array([-1.0, 0, 1]))
        assert (lo, mid, hi) == pytest.approx((6, 6, 6))

    def test_chain(self):
        lo, mid, hi = lemma1_sandwich(make_topology("chain", 3), np.array([-1.0, 0, 1]))
        assert (lo, mid, hi) == pytest.approx((2, 2, 6))

    def test_zero(self):
        assert lemma1_sandwich(make_topology("ring", 5), np.zeros(5)) == (0, 0, 0)

    def test_requires_centered(self):
        with pytest.raises(ValueError):
            lemma1_sandwich(make_topology("chain", 3), np.array([1.0, 2.0, 3.0]))

    def test_random_sandwich(self, rng):
        for _ in range(1000):
            n = int(rng.integers(3, 11))
            g = random_connected_graph(rng, n)
            phi = center_phases(rng.normal(size=n) * rng.uniform(0.01, 3))
            lo, mid, hi = lemma1_sandwich(g, phi)
            assert mid - lo >= -1e-12 * hi
            assert hi - mid >= -1e-12 * hi

    def test_edge_sum_direct(self):
        g = make_topology("ring", 4)
        phi = np.array([0.3, -0.1, 0.5, -0.7])
        direct = sum((phi[u - 1] - phi[v - 1]) ** 2 for u, v in g.edges)
        assert edge_difference_sum(g, phi) == pytest.approx(direct)
