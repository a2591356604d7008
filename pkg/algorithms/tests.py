import math

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from diffusion.types import LiveEdgeSample
from diffusion.utils import (
    build_sample,
    coverage_vector,
    enumerate_live_edge_graphs,
    evaluate_distribution,
    group_coverage,
    independent_coverage_exact,
)
from graph_core.types import CommunityStructure, Graph
from graph_core.utils import assign_uniform_weights, generate_barabasi_albert
from lp_interface.utils import solve
from solutions.utils import dp_violation_additive, min_group_coverage

from .baselines import grdy_maxmin, grdy_prop, mult_weight_maximin, myopic, uniform_solution
from .fair_lp import (
    grdy_grp_lp,
    grdy_grp_support,
    ind_lp,
    ind_lp_program,
    maxmin_lp,
    restricted_support_lp,
    surrogate_coverage,
)
from .greedy import brute_force_max_coverage, greedy_weighted_coverage, grdy_im
from .registry import ALGORITHMS, AlgorithmContext, run_algorithm
from .types import EtaRelaxation

APPROXIMATION = 1 - 1 / math.e


def star(leaves, weight):
    return Graph(leaves + 1, [0] * leaves, list(range(1, leaves + 1)), [weight] * leaves)


def singletons(n):
    return CommunityStructure([[v] for v in range(n)], n)


def price_of_fairness_graph(n):
    # I = 0..n/2-1, w = n/2 reaches all of I with certainty
    half = n // 2
    return Graph(n, [half] * half, list(range(half)), [1.0] * half)


def two_stars():
    # hubs 0 and 4, three leaves each
    sources = [0, 0, 0, 4, 4, 4]
    targets = [1, 2, 3, 5, 6, 7]
    return Graph(8, sources, targets, [0.5] * 6), CommunityStructure([range(4), range(4, 8)], 8)


def expected_spread(sample, distribution):
    return evaluate_distribution(sample, distribution).total


class GreedyTests(SimpleTestCase):

    def test_zero_budget(self):
        sample = enumerate_live_edge_graphs(star(3, 0.5))
        trace = greedy_weighted_coverage(sample, 0)
        self.assertEqual(trace.seeds, ())
        self.assertEqual(trace.prefix(0), ())

    def test_negative_budget(self):
        sample = enumerate_live_edge_graphs(star(3, 0.5))
        with self.assertRaises(ValidationError) as ctx:
            greedy_weighted_coverage(sample, -1)
        self.assertEqual(ctx.exception.code, 'argument')

    def test_chain_picks_source(self):
        chain = Graph(3, [0, 1], [1, 2], [1.0, 1.0])
        trace = grdy_im(enumerate_live_edge_graphs(chain), 1)
        self.assertEqual(trace.seeds, (0,))
        self.assertAlmostEqual(trace.value, 3.0)

    def test_star_picks_hub(self):
        trace = grdy_im(enumerate_live_edge_graphs(star(10, 0.11)), 1)
        self.assertEqual(trace.seeds, (0,))
        self.assertAlmostEqual(trace.value, 2.1)

    def test_price_of_fairness_hub(self):
        for n in (20, 40):
            trace = grdy_im(enumerate_live_edge_graphs(price_of_fairness_graph(n)), 1)
            self.assertEqual(trace.seeds, (n // 2,))
            self.assertAlmostEqual(trace.value, n / 2 + 1)

    def test_lowest_id_wins_ties(self):
        graph = Graph(4, [], [], [])
        trace = grdy_im(enumerate_live_edge_graphs(graph), 2)
        self.assertEqual(trace.seeds, (0, 1))

    def test_stops_when_everything_is_covered(self):
        chain = Graph(3, [0, 1], [1, 2], [1.0, 1.0])
        trace = grdy_im(enumerate_live_edge_graphs(chain), 3)
        self.assertEqual(trace.seeds, (0,))
        self.assertEqual(trace.prefix(3), (0,))

    def test_gains_do_not_increase(self):
        graph = assign_uniform_weights(generate_barabasi_albert(40, 2, 3), 0.4, 4)
        trace = grdy_im(build_sample(graph, 'IC', 100, rng_seed=5), 8)
        self.assertTrue(all(a >= b - 1e-9 for a, b in zip(trace.gains, trace.gains[1:])))
        self.assertEqual(len(trace.prefixes()), 9)

    def test_horizon_extends_prefixes(self):
        graph = assign_uniform_weights(generate_barabasi_albert(30, 2, 6), 0.3, 7)
        sample = build_sample(graph, 'IC', 50, rng_seed=8)
        short, long = grdy_im(sample, 2), grdy_im(sample, 2, horizon=4)
        self.assertEqual(long.prefix(2), short.prefix(2))
        self.assertEqual(len(long.prefixes(4)), 5)

    def test_weighted_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for trial in range(5):
            graph = assign_uniform_weights(generate_barabasi_albert(8, 2, trial), 0.6, trial + 100)
            sample = build_sample(graph, 'IC', 200, rng_seed=trial)
            weights = np.zeros(8)
            weights[rng.choice(8, size=3, replace=False)] = 1.0
            best, value = brute_force_max_coverage(sample, 1, weights)
            trace = greedy_weighted_coverage(sample, 1, weights)
            self.assertAlmostEqual(trace.value, value, places=9)
            self.assertEqual(trace.seeds, best)

    def test_approximation_against_brute_force(self):
        for trial in range(20):
            n = 6 + trial % 5
            k = 1 + trial % 3
            graph = assign_uniform_weights(generate_barabasi_albert(n, 2, trial), 0.5, trial + 50)
            sample = build_sample(graph, 'IC', 100, rng_seed=trial)
            _, optimum = brute_force_max_coverage(sample, k)
            self.assertGreaterEqual(grdy_im(sample, k).value, APPROXIMATION * optimum - 1e-9)


class BaselineTests(SimpleTestCase):

    def setUp(self):
        graph = assign_uniform_weights(generate_barabasi_albert(30, 2, 21), 0.4, 22)
        self.graph = graph
        self.sample = build_sample(graph, 'IC', 80, rng_seed=23)

    def test_maxmin_single_community_is_greedy(self):
        everyone = CommunityStructure([range(30)], 30)
        self.assertEqual(grdy_maxmin(self.sample, everyone, 3).nodes, tuple(sorted(grdy_im(self.sample, 3).seeds)))

    def test_maxmin_star_hub(self):
        sample = enumerate_live_edge_graphs(star(10, 0.11))
        self.assertEqual(grdy_maxmin(sample, singletons(11), 1).nodes, (0,))

    def test_maxmin_one_seed_per_clique(self):
        sources, targets = [], []
        for block in (range(5), range(5, 10)):
            for u in block:
                for v in block:
                    if u != v:
                        sources.append(u)
                        targets.append(v)
        graph = Graph(10, sources, targets, [1.0] * len(sources))
        cliques = CommunityStructure([range(5), range(5, 10)], 10)
        seeds = grdy_maxmin(enumerate_live_edge_graphs(graph), cliques, 2).nodes
        self.assertEqual(seeds, (0, 5))

    def test_prop_single_community_is_greedy(self):
        everyone = CommunityStructure([range(30)], 30)
        self.assertEqual(grdy_prop(self.sample, everyone, 4).nodes, tuple(sorted(grdy_im(self.sample, 4).seeds)))

    def test_prop_splits_budget(self):
        empty = enumerate_live_edge_graphs(Graph(8, [], [], []))
        halves = CommunityStructure([range(4), range(4, 8)], 8)
        self.assertEqual(grdy_prop(empty, halves, 4).nodes, (0, 1, 4, 5))

    def test_prop_rounds_down_to_global_greedy(self):
        tenths = CommunityStructure([range(3 * i, 3 * i + 3) for i in range(10)], 30)
        self.assertEqual(grdy_prop(self.sample, tenths, 1).nodes, grdy_im(self.sample, 1).seeds)

    def test_myopic(self):
        graph = star(10, 0.11)
        sample = enumerate_live_edge_graphs(graph)
        self.assertEqual(myopic(graph, sample, 1).nodes, (0,))
        self.assertEqual(myopic(graph, sample, 2).nodes, (0, 1))
        self.assertEqual(myopic(graph, sample, 11).nodes, tuple(range(11)))

    def test_uniform(self):
        solution = uniform_solution(200, 25)
        self.assertTrue(np.allclose(solution.x, 0.125))
        self.assertAlmostEqual(solution.x.sum(), 25.0)
        self.assertTrue(np.array_equal(uniform_solution(5, 5).x, np.ones(5)))
        self.assertTrue(np.array_equal(uniform_solution(5, 0).x, np.zeros(5)))
        with self.assertRaises(ValidationError):
            uniform_solution(3, 4)

    def test_mult_weight_single_community(self):
        everyone = CommunityStructure([range(30)], 30)
        distribution = mult_weight_maximin(self.sample, everyone, 2, iterations=5)
        self.assertEqual(len(distribution), 1)
        self.assertEqual(distribution.support[0].nodes, tuple(sorted(grdy_im(self.sample, 2).seeds)))

    def test_mult_weight_star(self):
        sample = enumerate_live_edge_graphs(star(10, 0.11))
        distribution = mult_weight_maximin(sample, singletons(11), 1)
        self.assertEqual([entry.nodes for entry in distribution], [(0,)])

    def test_mult_weight_mixes_symmetric_stars(self):
        graph, communities = two_stars()
        sample = enumerate_live_edge_graphs(graph)
        distribution = mult_weight_maximin(sample, communities, 1, iterations=20)
        shares = {entry.nodes: entry.weight for entry in distribution}
        self.assertEqual(set(shares), {(0,), (4,)})
        self.assertAlmostEqual(shares[(0,)], 0.5, delta=0.1)
        mixed = min_group_coverage(group_coverage(evaluate_distribution(sample, distribution), communities))
        best_single = max(
            min_group_coverage(group_coverage(coverage_vector(sample, [v]), communities)) for v in range(8)
        )
        self.assertGreater(mixed, best_single)

    def test_mult_weight_arguments(self):
        with self.assertRaises(ValidationError):
            mult_weight_maximin(self.sample, singletons(30), 1, iterations=0)
        with self.assertRaises(ValidationError):
            mult_weight_maximin(self.sample, singletons(30), 1, step=1.5)


class IndependentLpTests(SimpleTestCase):

    def test_no_edges_is_uniform(self):
        sample = enumerate_live_edge_graphs(Graph(4, [], [], []))
        solution = ind_lp(sample, singletons(4), 2)
        self.assertTrue(np.allclose(solution.x, 0.5, atol=1e-6))

    def test_two_node(self):
        graph = Graph(2, [0], [1], [0.75])
        sample = enumerate_live_edge_graphs(graph)
        solution = ind_lp(sample, singletons(2), 1)
        self.assertTrue(np.allclose(solution.x, [0.8, 0.2], atol=1e-4))
        coverage = independent_coverage_exact(sample, solution)
        self.assertAlmostEqual(coverage[0], 0.8, places=4)
        self.assertAlmostEqual(coverage[1], 0.68, places=4)
        self.assertGreaterEqual(coverage[1], APPROXIMATION * coverage[0])

    def test_lp_group_values_are_equal(self):
        graph = assign_uniform_weights(generate_barabasi_albert(12, 2, 31), 0.4, 32)
        sample = build_sample(graph, 'IC', 20, rng_seed=33)
        communities = CommunityStructure([range(6), range(6, 12)], 12)
        lp, x, gamma = ind_lp_program(sample, communities, 2)
        result = solve(lp)
        self.assertTrue(result.ok)
        groups = group_coverage(surrogate_coverage(sample, result.x[x]), communities)
        self.assertLessEqual(np.abs(groups - result.x[gamma]).max(), 1e-6)
        self.assertLessEqual(result.x[x].sum(), 2 + 1e-6)
        self.assertAlmostEqual(surrogate_coverage(sample, result.x[x]).total, result.objective, places=5)

    def test_exact_program_keeps_only_node_variables(self):
        graph = assign_uniform_weights(generate_barabasi_albert(12, 2, 37), 0.4, 38)
        sample = build_sample(graph, 'IC', 50, rng_seed=39)
        lp, x, gamma = ind_lp_program(sample, singletons(12), 2)
        self.assertEqual(lp.variable_count, 13)
        # budget + distinct multi-source reach rows + one fairness row per node
        self.assertLessEqual(lp.constraint_count, 1 + len(sample) * 12 + 12)

    def test_repeated_live_edge_graphs_are_merged(self):
        graph = assign_uniform_weights(generate_barabasi_albert(12, 2, 40), 0.4, 41)
        sample = build_sample(graph, 'IC', 15, rng_seed=42)
        doubled = LiveEdgeSample(graph, np.vstack([sample.masks, sample.masks]))
        for eta in (0.0, 0.25):
            single, _, _ = ind_lp_program(sample, singletons(12), 2, eta)
            double, _, _ = ind_lp_program(doubled, singletons(12), 2, eta)
            self.assertEqual(single.variable_count, double.variable_count)
            self.assertEqual(single.constraint_count, double.constraint_count)
            self.assertAlmostEqual(solve(single).objective, solve(double).objective, places=6)
        self.assertLess(single.variable_count, 12 + len(sample) * 12 + 1)

    def test_scales_to_preset_size(self):
        graph = assign_uniform_weights(generate_barabasi_albert(200, 2, 43), 0.4, 44)
        sample = build_sample(graph, 'IC', 1000, rng_seed=45)
        lp, _, _ = ind_lp_program(sample, singletons(200), 25)
        self.assertEqual(lp.variable_count, 201)
        self.assertTrue(solve(lp).ok)

    def test_band_does_not_lower_objective(self):
        graph = assign_uniform_weights(generate_barabasi_albert(12, 2, 34), 0.4, 35)
        sample = build_sample(graph, 'IC', 20, rng_seed=36)
        objectives = [solve(ind_lp_program(sample, singletons(12), 2, eta)[0]).objective for eta in (0, 0.25, 0.5)]
        self.assertTrue(all(a <= b + 1e-6 for a, b in zip(objectives, objectives[1:])))

    def test_eta_range(self):
        sample = enumerate_live_edge_graphs(Graph(2, [], [], []))
        with self.assertRaises(ValidationError):
            ind_lp(sample, singletons(2), 1, eta=1.0)


class DistributionLpTests(SimpleTestCase):

    def setUp(self):
        self.star = enumerate_live_edge_graphs(star(10, 0.11))

    def test_star_fair_distribution(self):
        distribution = grdy_grp_lp(self.star, singletons(11), 1, 0.0)
        coverage = evaluate_distribution(self.star, distribution)
        self.assertLessEqual(dp_violation_additive(coverage.values), 1e-6)
        self.assertGreaterEqual(coverage.total, 11 / 9.9 - 1e-4)
        self.assertLessEqual(distribution.expected_size, 1 + 1e-6)

    def test_single_community_is_greedy_prefix(self):
        graph = assign_uniform_weights(generate_barabasi_albert(20, 2, 41), 0.4, 42)
        sample = build_sample(graph, 'IC', 50, rng_seed=43)
        everyone = CommunityStructure([range(20)], 20)
        distribution = grdy_grp_lp(sample, everyone, 2, 0.0)
        # greedy values are concave in the prefix length, so no mixture beats T_2
        self.assertAlmostEqual(expected_spread(sample, distribution), grdy_im(sample, 2).value, places=6)
        self.assertLessEqual(distribution.expected_size, 2 + 1e-6)

    def test_price_of_fairness(self):
        ratios = []
        for n in (20, 40):
            sample = enumerate_live_edge_graphs(price_of_fairness_graph(n))
            optimum = grdy_im(sample, 1).value
            fair_values = []
            for algorithm in (grdy_grp_lp, maxmin_lp):
                fair = expected_spread(sample, algorithm(sample, singletons(n), 1, 0.0))
                self.assertLessEqual(fair, 2 + 0.05)
                fair_values.append(fair)
            ratios.append(optimum / max(fair_values))
        self.assertGreaterEqual(ratios[1], 1.9 * ratios[0])

    def test_band_holds_on_sample(self):
        graph = assign_uniform_weights(generate_barabasi_albert(25, 2, 51), 0.4, 52)
        sample = build_sample(graph, 'IC', 60, rng_seed=53)
        communities = CommunityStructure([range(0, 10), range(10, 25)], 25)
        support = grdy_grp_support(sample, communities, 3)
        for eta in (0.0, 0.05, 0.2):
            distribution, result = restricted_support_lp(sample, communities, 3, eta, support)
            groups = group_coverage(evaluate_distribution(sample, distribution), communities)
            gamma = result.x[-1]
            self.assertLessEqual(np.abs(groups - gamma).max(), eta + 1e-6)
            self.assertLessEqual(distribution.expected_size, 3 + 1e-6)

    def test_objective_grows_with_eta(self):
        graph = assign_uniform_weights(generate_barabasi_albert(25, 2, 61), 0.4, 62)
        sample = build_sample(graph, 'IC', 60, rng_seed=63)
        communities = singletons(25)
        support = grdy_grp_support(sample, communities, 2)
        objectives = [restricted_support_lp(sample, communities, 2, eta, support)[1].objective
                      for eta in (0.0, 0.05, 0.1, 0.3)]
        self.assertTrue(all(a <= b + 1e-6 for a, b in zip(objectives, objectives[1:])))

    def test_maxmin_lp_star(self):
        distribution = maxmin_lp(self.star, singletons(11), 1, 0.0)
        coverage = evaluate_distribution(self.star, distribution)
        self.assertLessEqual(dp_violation_additive(coverage.values), 1e-6)
        self.assertGreaterEqual(coverage.total, 11 / 9.9 - 1e-4)

    def test_maxmin_lp_large_eta_keeps_q(self):
        graph, communities = two_stars()
        sample = enumerate_live_edge_graphs(graph)
        q = mult_weight_maximin(sample, communities, 1, iterations=20)
        distribution = maxmin_lp(sample, communities, 1, 1.0, iterations=20)
        self.assertGreaterEqual(expected_spread(sample, distribution), expected_spread(sample, q) - 1e-6)

    def test_maxmin_lp_single_community(self):
        graph = assign_uniform_weights(generate_barabasi_albert(20, 2, 71), 0.4, 72)
        sample = build_sample(graph, 'IC', 50, rng_seed=73)
        everyone = CommunityStructure([range(20)], 20)
        distribution = maxmin_lp(sample, everyone, 2, 0.0, iterations=3)
        self.assertEqual([entry.nodes for entry in distribution], [tuple(sorted(grdy_im(sample, 2).seeds))])


class RegistryTests(SimpleTestCase):

    def test_every_algorithm_respects_the_budget(self):
        graph = assign_uniform_weights(generate_barabasi_albert(20, 2, 81), 0.4, 82)
        sample = build_sample(graph, 'IC', 30, rng_seed=83)
        communities = CommunityStructure([range(10), range(10, 20)], 20)
        context = AlgorithmContext(graph, sample, communities, 3, mult_weight_iterations=5)
        for algorithm_id in ALGORITHMS:
            solution = run_algorithm(algorithm_id, context, 0.1)
            size = getattr(solution, 'expected_size', None)
            if size is None:
                size = len(solution) if hasattr(solution, 'nodes') else solution.x.sum()
            self.assertLessEqual(size, 3 + 1e-6, algorithm_id)

    def test_unknown_algorithm(self):
        with self.assertRaises(ValidationError):
            run_algorithm('milp', None)


class EtaTests(SimpleTestCase):

    def test_presets(self):
        self.assertEqual(EtaRelaxation.parse('0').eta, 0.0)
        self.assertAlmostEqual(EtaRelaxation.parse('1/3').eta, 1 / 3)
        self.assertAlmostEqual(EtaRelaxation.parse('x/16', reference=0.8).eta, 0.05)
        self.assertEqual(EtaRelaxation.parse('x/8', reference=0.8).label, 'x/8')

    def test_relative_needs_reference(self):
        with self.assertRaises(ValidationError):
            EtaRelaxation.parse('x/4')

    def test_range(self):
        with self.assertRaises(ValidationError):
            EtaRelaxation(1.5)
        with self.assertRaises(ValidationError):
            EtaRelaxation.parse('-0.1')
