import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kuracert.bounds import k_bound_analytic
from kuracert.graph import build_graph, make_topology
from kuracert.optimizer import (STATUS_BOUNDARY, STATUS_CONVERGED, STATUS_INFEASIBLE,
                                PairProblem, brute_force_oracle, constraint_violation,
                                denominator, k_star, minimize_pair)
from kuracert.state import center_phases, deviations, energy

from conftest import random_connected_graph

PAIR = build_graph(2, [(1, 2)])


class TestProblem:
    @pytest.mark.parametrize("k, l, D, E0", [(1, 1, 1.0, 0.9), (0, 2, 1.0, 0.9),
                                             (1, 4, 1.0, 0.9), (1, 2, 0.0, 0.9),
                                             (1, 2, math.pi, 0.9), (1, 2, 1.0, -0.1)])
    def test_invalid(self, k, l, D, E0):
        with pytest.raises(ValueError):
            PairProblem(make_topology("chain", 3), k, l, D, E0)

    def test_interior(self):
        p = PairProblem(make_topology("chain", 5), 4, 2, 1.0, 0.9)
        assert p.interior() == [1, 3, 5]
        assert p.radius2 == pytest.approx(0.4)


class TestTwoNodes:
    @pytest.mark.parametrize("D", [0.3, 1.0, 2.0])
    def test_unique_point(self, D):
        res = minimize_pair(PairProblem(PAIR, 1, 2, D, 0.9 * D * D))
        assert res.min_denominator == pytest.approx(2 * math.sin(D), abs=1e-15)
        assert res.status == STATUS_BOUNDARY
        assert np.allclose(res.argmin, [D / 2, -D / 2])

    def test_k_star_closed_form(self):
        f = deviations([0.9, 0.2])
        D = 1.1
        ks = k_star(PAIR, f, 0.55 * D * D, D)
        assert ks.value == pytest.approx(abs(f.dev[0] - f.dev[1]) / math.sin(D))
        assert ks.pair == (1, 2)

    def test_oracle(self):
        o = brute_force_oracle(PairProblem(PAIR, 1, 2, 1.0, 0.9))
        assert o.value == pytest.approx(2 * math.sin(1.0))


class TestAgainstOracle:
    def test_chain3_pair_31(self):
        D = math.pi / 2
        p = PairProblem(make_topology("chain", 3), 3, 1, D, 0.7 * D * D)
        res, orc = minimize_pair(p), brute_force_oracle(p, 2001)
        assert abs(res.min_denominator - orc.value) <= 2e-3
        assert res.min_denominator <= orc.value + 1e-12

    def test_ring3(self):
        for k, l in itertools.permutations(range(1, 4), 2):
            p = PairProblem(make_topology("ring", 3), k, l, 1.0, 0.9)
            res, orc = minimize_pair(p), brute_force_oracle(p, 2001)
            assert abs(res.min_denominator - orc.value) <= orc.tolerance

    def test_complete3_symmetric_point(self):
        """In K3 the objective depends only on the interior phase; the oracle agrees."""
        D, E0 = 1.2, 0.8 * 1.44
        g = make_topology("complete", 3)
        p = PairProblem(g, 1, 2, D, E0)
        phi = np.array([D / 2, -D / 2, 0.0])
        assert constraint_violation(p, phi) == 0
        orc = brute_force_oracle(p, 2001)
        assert denominator(g, 1, 2, phi) >= orc.value - orc.tolerance
        assert abs(minimize_pair(p).min_denominator - orc.value) <= orc.tolerance

    @pytest.mark.parametrize("kind", ["chain", "ring", "star_tree", "complete"])
    def test_four_nodes_coarse(self, kind):
        g = make_topology(kind, 4)
        for D, ratio in [(math.pi / 2, 0.7), (2.5, 0.6)]:
            for k, l in itertools.combinations(range(1, 5), 2):
                p = PairProblem(g, k, l, D, ratio * D * D)
                res, orc = minimize_pair(p), brute_force_oracle(p, 301)
                assert res.min_denominator <= orc.value + 1e-12
                assert orc.value - res.min_denominator <= orc.tolerance
                assert constraint_violation(p, res.argmin) <= 1e-10


class TestProperties:
    def test_infeasible_budget(self):
        D = 1.0
        res = minimize_pair(PairProblem(make_topology("ring", 4), 1, 3, D, 0.4 * D * D))
        assert res.status == STATUS_INFEASIBLE and math.isnan(res.min_denominator)

    def test_boundary_budget(self):
        D = 1.0
        res = minimize_pair(PairProblem(make_topology("ring", 4), 1, 3, D, D * D / 2))
        assert res.status == STATUS_BOUNDARY

    def test_feasible_argmin(self, rng):
        for _ in range(30):
            n = int(rng.integers(3, 9))
            g = random_connected_graph(rng, n)
            D = rng.uniform(0.2, 3.0)
            k, l = (int(x) for x in rng.choice(np.arange(1, n + 1), 2, replace=False))
            p = PairProblem(g, k, l, D, rng.uniform(0.5, 1.0) * D * D)
            res = minimize_pair(p, n_random=8)
            assert constraint_violation(p, res.argmin) <= 1e-10
            assert res.min_denominator == pytest.approx(denominator(g, k, l, res.argmin))

    def test_pair_symmetry(self, rng):
        for _ in range(30):
            n = int(rng.integers(3, 9))
            g = random_connected_graph(rng, n)
            D = rng.uniform(0.2, 3.0)
            E0 = rng.uniform(0.5, 1.0) * D * D
            k, l = (int(x) for x in rng.choice(np.arange(1, n + 1), 2, replace=False))
            a = minimize_pair(PairProblem(g, k, l, D, E0), n_random=8)
            b = minimize_pair(PairProblem(g, l, k, D, E0), n_random=8)
            assert abs(a.min_denominator - b.min_denominator) <= 1e-8
            assert np.allclose(a.argmin, -b.argmin)

    def test_positivity(self, rng):
        for _ in range(30):
            n = int(rng.integers(3, 9))
            g = random_connected_graph(rng, n)
            D = rng.uniform(0.1, math.pi - 0.1)
            E0 = rng.uniform(0.5, 1.0 - 1e-9) * D * D
            for k, l in itertools.combinations(range(1, n + 1), 2):
                res = minimize_pair(PairProblem(g, k, l, D, E0), n_random=4)
                if res.status == STATUS_CONVERGED:
                    assert res.min_denominator > 0

    def test_refinement(self, rng):
        """Inside the closed-form region the optimised denominator beats its lower bound."""
        for _ in range(40):
            n = int(rng.integers(3, 9))
            g = random_connected_graph(rng, n)
            D = rng.uniform(0.1, math.pi / 2)
            E0 = rng.uniform(0.5, 0.75 - 1e-6) * D * D
            floor = 2 * g.constants.delta * math.sin(D / 2 - math.sqrt(max(0, E0 - D * D / 2)))
            f = deviations(rng.uniform(0, 1, n))
            ks = k_star(g, f, E0, D, n_random=8)
            for r in ks.pairs:
                assert r.min_denominator >= floor - 1e-8
            an = k_bound_analytic(n, g.constants.delta, f.dev, D, E0)
            assert ks.value <= an.value + 1e-6

    def test_deterministic_and_order_free(self):
        g = make_topology("ring", 6)
        f = deviations([0.1, 0.5, 0.3, 0.9, 0.2, 0.7])
        a = k_star(g, f, 0.8, 1.0, seed=4)
        b = k_star(g, f, 0.8, 1.0, seed=4)
        assert a.value == b.value and a.pair == b.pair
        single = minimize_pair(PairProblem(g, 3, 5, 1.0, 0.8), seed=4)
        same = next(r for r in a.pairs if (r.k, r.l) == (3, 5))
        assert single.min_denominator == same.min_denominator


class TestKStar:
    def test_homogeneous(self):
        ks = k_star(make_topology("chain", 4), deviations(np.full(4, 0.3)), 0.7, 1.0)
        assert ks.value == 0 and ks.pair == (1, 2)

    def test_all_pairs_reported(self):
        ks = k_star(make_topology("star_tree", 5), deviations(np.arange(5.0)), 0.8, 1.0,
                    n_random=4)
        assert [(r.k, r.l) for r in ks.pairs] == list(itertools.combinations(range(1, 6), 2))
        assert ks.value == max(r.K_kl for r in ks.pairs)

    def test_phase_vector_entry(self):
        g = make_topology("chain", 4)
        phi = center_phases([0.2, 0.6, 0.9, 0.4])
        f = deviations([0.1, 0.5, 0.3, 0.9])
        assert k_star(g, f, phi, 0.7).value == k_star(g, f, energy(phi), 0.7).value
        with pytest.raises(ValueError):
            k_star(g, f, phi, 0.5)

    @pytest.mark.parametrize("E0, D", [(1.0, 1.0), (0.5, math.pi), (0.5, 0.0)])
    def test_rejects(self, E0, D):
        with pytest.raises(ValueError):
            k_star(make_topology("chain", 3), deviations([0, 1, 2]), E0, D)

    @given(st.floats(0.1, 10.0))
    @settings(max_examples=10, deadline=None)
    def test_scale_covariance(self, c):
        g = make_topology("chain", 4)
        w = np.array([0.1, 0.5, 0.3, 0.9])
        base = k_star(g, deviations(w), 0.8, 1.0, n_random=8).value
        assert k_star(g, deviations(c * w), 0.8, 1.0, n_random=8).value == pytest.approx(
            c * base, rel=1e-9)
