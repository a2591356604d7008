from itertools import combinations

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from fixtures.utils import star_instance, two_node_instance
from graph_core.types import CommunityStructure, Graph
from graph_core.utils import assign_uniform_weights, generate_barabasi_albert, load_edge_list

from .utils import (
    build_sample,
    coverage_vector,
    default_draw_count,
    enumerate_live_edge_graphs,
    evaluate_distribution,
    evaluate_independent,
    exact_spread,
    group_coverage,
    independent_coverage_exact,
    reachable_set,
    sample_live_edge_graph,
)


def star(leaves, weight):
    return Graph(leaves + 1, [0] * leaves, list(range(1, leaves + 1)), [weight] * leaves)


class SamplingTests(SimpleTestCase):

    def test_zero_weights_give_no_live_edges(self):
        graph = load_edge_list("a b 0\nb c 0\n")
        rng = np.random.default_rng(0)
        for _ in range(20):
            self.assertFalse(sample_live_edge_graph(graph, 'IC', rng).mask.any())

    def test_unit_weights_keep_every_edge(self):
        graph = load_edge_list("a b 1\nb c 1\nc a 1\n")
        rng = np.random.default_rng(0)
        self.assertTrue(sample_live_edge_graph(graph, 'IC', rng).mask.all())

    def test_inclusion_frequency(self):
        graph = load_edge_list("a b 0.75")
        sample = build_sample(graph, 'IC', 100000, rng_seed=5)
        self.assertAlmostEqual(sample.masks.mean(), 0.75, delta=0.01)

    def test_lt_keeps_at_most_one_in_edge(self):
        graph = load_edge_list("a c 0.5\nb c 0.4\nd c 0.1\na b 0.3\n")
        sample = build_sample(graph, 'LT', 2000, rng_seed=1)
        for mask in sample.masks:
            indegree = np.bincount(graph.targets[mask], minlength=graph.n)
            self.assertLessEqual(indegree.max(), 1)
        # node c always picks exactly one of its three in-neighbours (weights sum to 1)
        into_c = graph.targets == graph.label_index['c']
        self.assertTrue((sample.masks[:, into_c].sum(axis=1) == 1).all())
        shares = sample.masks[:, into_c].mean(axis=0)
        self.assertTrue(np.allclose(shares, [0.5, 0.4, 0.1], atol=0.04))

    def test_lt_rejects_heavy_in_weights(self):
        graph = load_edge_list("a c 0.7\nb c 0.6\n")
        with self.assertRaises(ValidationError) as ctx:
            build_sample(graph, 'LT', 1, rng_seed=0)
        self.assertEqual(ctx.exception.code, 'model')
        self.assertIn("'c'", ctx.exception.message)

    def test_unweighted_graph_is_rejected(self):
        with self.assertRaises(ValidationError) as ctx:
            build_sample(load_edge_list("a b"), 'IC', 1, rng_seed=0)
        self.assertEqual(ctx.exception.code, 'weights')

    def test_sample_is_deterministic(self):
        graph = assign_uniform_weights(generate_barabasi_albert(30, 2, 1), 0.4, 2)
        first = build_sample(graph, 'IC', 50, rng_seed=3)
        second = build_sample(graph, 'IC', 50, rng_seed=3)
        self.assertTrue(np.array_equal(first.masks, second.masks))
        self.assertEqual(len(first), 50)


class ReachabilityTests(SimpleTestCase):

    def setUp(self):
        self.chain = load_edge_list("0 1 1\n1 2 1\n")
        self.live = sample_live_edge_graph(self.chain, 'IC', np.random.default_rng(0))

    def test_empty_seeds(self):
        self.assertEqual(reachable_set(self.live, []), frozenset())

    def test_all_seeds(self):
        self.assertEqual(reachable_set(self.live, range(3)), frozenset(range(3)))

    def test_chain(self):
        self.assertEqual(reachable_set(self.live, [0]), frozenset({0, 1, 2}))
        self.assertEqual(reachable_set(self.live, [1]), frozenset({1, 2}))

    def test_out_of_range_seed(self):
        with self.assertRaises(ValidationError):
            reachable_set(self.live, [5])


class CoverageTests(SimpleTestCase):

    def setUp(self):
        self.two_node = load_edge_list("a b 0.75")

    def test_two_node_exact(self):
        coverage = exact_spread(self.two_node, [0])
        self.assertEqual(coverage[0], 1.0)
        self.assertAlmostEqual(coverage[1], 0.75)
        self.assertAlmostEqual(coverage.total, 1.75)

    def test_two_node_sampled_converges(self):
        sample = build_sample(self.two_node, 'IC', 20000, rng_seed=4)
        self.assertAlmostEqual(coverage_vector(sample, [0]).total, 1.75, delta=0.02)

    def test_empty_seed_set(self):
        sample = build_sample(self.two_node, 'IC', 10, rng_seed=0)
        self.assertEqual(coverage_vector(sample, []).total, 0.0)
        self.assertEqual(exact_spread(self.two_node, []).total, 0.0)

    def test_star_hub_spread(self):
        self.assertAlmostEqual(exact_spread(star(4, 0.25), [0]).total, 2.0)
        self.assertAlmostEqual(exact_spread(star(10, 1.1 / 10), [0]).total, 2.1)

    def test_group_coverage(self):
        graph = star(4, 0.25)
        coverage = exact_spread(graph, [0])
        singletons = CommunityStructure([[v] for v in range(5)], 5)
        self.assertTrue(np.allclose(group_coverage(coverage, singletons), coverage.values))
        everyone = CommunityStructure([range(5)], 5)
        self.assertAlmostEqual(group_coverage(coverage, everyone)[0], coverage.total / 5)

    def test_enumeration_cap(self):
        with self.assertRaises(ValidationError) as ctx:
            exact_spread(star(21, 0.01), [0])
        self.assertEqual(ctx.exception.code, 'size')

    def test_deterministic_edges_do_not_count_against_cap(self):
        graph = star(30, 1.0)
        self.assertEqual(len(enumerate_live_edge_graphs(graph)), 1)
        self.assertAlmostEqual(exact_spread(graph, [0]).total, 31.0)

    def test_monotone_in_seed_set(self):
        graph = assign_uniform_weights(generate_barabasi_albert(25, 2, 8), 0.4, 9)
        sample = build_sample(graph, 'IC', 200, rng_seed=10)
        smaller = coverage_vector(sample, [1, 4]).values
        larger = coverage_vector(sample, [1, 4, 7, 12]).values
        self.assertTrue((larger >= smaller - 1e-12).all())

    def test_sampled_matches_exact_on_small_graphs(self):
        rng = np.random.default_rng(99)
        pool = [
            two_node_instance().graph,
            star_instance(4, 0.2).graph,
            Graph(6, rng.integers(0, 6, size=10), rng.integers(0, 6, size=10), rng.uniform(0.0, 1.0, size=10)),
        ]
        for graph in pool:
            exact = enumerate_live_edge_graphs(graph)
            seed_sets = [seeds for size in (1, 2) for seeds in combinations(range(graph.n), size)]
            truths = [coverage_vector(exact, seeds).total for seeds in seed_sets]
            passed = 0
            for trial in range(100):
                sample = build_sample(graph, 'IC', 10000, rng_seed=trial)
                errors = [abs(coverage_vector(sample, seeds).total - truth) for seeds, truth in zip(seed_sets, truths)]
                passed += max(errors) <= 0.05 * graph.n
            self.assertGreaterEqual(passed, 99, graph)


class IndependentEvaluationTests(SimpleTestCase):

    def setUp(self):
        self.graph = load_edge_list("a b 0.75")

    def test_default_draw_count(self):
        self.assertEqual(default_draw_count(), 150)
        self.assertEqual(default_draw_count(0.1, 0.1), 150)

    def test_zero_vector(self):
        sample = build_sample(self.graph, 'IC', 50, rng_seed=0)
        self.assertEqual(evaluate_independent(sample, [0.0, 0.0], 20, rng_seed=1).total, 0.0)

    def test_fair_independent_solution_exact(self):
        exact = enumerate_live_edge_graphs(self.graph)
        coverage = independent_coverage_exact(exact, [2 / 3, 1 / 3])
        self.assertAlmostEqual(coverage[0], 2 / 3)
        self.assertAlmostEqual(coverage[1], 2 / 3)
        self.assertAlmostEqual(coverage.total, 4 / 3)

    def test_fair_independent_solution_sampled(self):
        exact = enumerate_live_edge_graphs(self.graph)
        coverage = evaluate_independent(exact, [2 / 3, 1 / 3], 20000, rng_seed=2)
        self.assertAlmostEqual(coverage[0], 2 / 3, delta=0.02)
        self.assertAlmostEqual(coverage[1], 2 / 3, delta=0.02)

    def test_rejects_out_of_range(self):
        sample = build_sample(self.graph, 'IC', 5, rng_seed=0)
        with self.assertRaises(ValidationError):
            evaluate_independent(sample, [1.2, 0.0], 5, rng_seed=0)


class DistributionEvaluationTests(SimpleTestCase):

    def setUp(self):
        # two hubs wired to six leaves with certainty
        sources = [0] * 6 + [1] * 6
        targets = list(range(2, 8)) * 2
        self.blowup = Graph(8, sources, targets, [1.0] * 12)
        self.exact = enumerate_live_edge_graphs(self.blowup)

    def test_point_mass_on_empty_set(self):
        self.assertEqual(evaluate_distribution(self.exact, [((), 1.0)]).total, 0.0)

    def test_half_on_both_hubs(self):
        coverage = evaluate_distribution(self.exact, [((0, 1), 0.5), ((), 0.5)])
        self.assertAlmostEqual(coverage.total, 4.0)
        self.assertTrue(np.allclose(coverage.values, 0.5))

    def test_weights_must_sum_to_one(self):
        with self.assertRaises(ValidationError) as ctx:
            evaluate_distribution(self.exact, [((0,), 0.4)])
        self.assertEqual(ctx.exception.code, 'distribution')

    def test_linear_in_distribution(self):
        p = [((0,), 0.3), ((1, 2), 0.7)]
        q = [((3,), 0.5), ((), 0.5)]
        mixed = [((0,), 0.25 * 0.3), ((1, 2), 0.25 * 0.7), ((3,), 0.75 * 0.5), ((), 0.75 * 0.5)]
        left = evaluate_distribution(self.exact, mixed).values
        right = 0.25 * evaluate_distribution(self.exact, p).values + 0.75 * evaluate_distribution(self.exact, q).values
        self.assertTrue(np.allclose(left, right))
