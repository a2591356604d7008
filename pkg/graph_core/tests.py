import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from .types import CommunityStructure, Graph
from .utils import (
    assign_uniform_weights,
    build_communities,
    dump_edge_list,
    generate_barabasi_albert,
    largest_weakly_connected_component,
    load_communities,
    load_edge_list,
    scale_in_weights,
)


class EdgeListTests(SimpleTestCase):

    def test_single_weighted_line(self):
        graph = load_edge_list("a b 0.5", directed=True)
        self.assertEqual(graph.n, 2)
        self.assertEqual(graph.edge_count, 1)
        self.assertEqual((graph.sources[0], graph.targets[0]), (0, 1))
        self.assertEqual(graph.weights[0], 0.5)

    def test_undirected_line_is_stored_both_ways(self):
        graph = load_edge_list("a b", directed=False)
        self.assertEqual(list(zip(graph.sources, graph.targets)), [(0, 1), (1, 0)])
        self.assertTrue(np.isnan(graph.weights).all())
        self.assertFalse(graph.has_weights)

    def test_duplicate_edges_are_merged(self):
        graph = load_edge_list("a b 0.3\na b 0.3\n")
        self.assertEqual(graph.edge_count, 1)
        self.assertEqual(dump_edge_list(graph), "a b 0.3\n")

    def test_first_weight_wins(self):
        graph = load_edge_list("a b 0.3\na b 0.9\n")
        self.assertEqual(graph.weights.tolist(), [0.3])

    def test_comments_and_blank_lines_are_skipped(self):
        graph = load_edge_list("# header\n\nx y 0.1  # trailing\n")
        self.assertEqual(graph.labels, ('x', 'y'))

    def test_malformed_line_names_line_number(self):
        with self.assertRaises(ValidationError) as ctx:
            load_edge_list("a b\nc\n")
        self.assertEqual(ctx.exception.code, 'parse')
        self.assertIn("Line 2", ctx.exception.message)

    def test_weight_out_of_range(self):
        with self.assertRaises(ValidationError) as ctx:
            load_edge_list("a b 1.5")
        self.assertEqual(ctx.exception.code, 'range')


class NeighbourTests(SimpleTestCase):

    def setUp(self):
        self.graph = Graph(4, [2, 0, 1, 0], [3, 3, 3, 1], [0.1, 0.2, 0.3, 0.4])

    def test_in_neighbors_are_ascending(self):
        self.assertEqual(self.graph.in_neighbors(3).tolist(), [0, 1, 2])
        self.assertEqual(self.graph.in_neighbors(1).tolist(), [0])
        self.assertEqual(self.graph.in_neighbors(0).tolist(), [])

    def test_out_neighbors(self):
        self.assertEqual(self.graph.out_neighbors(0).tolist(), [1, 3])
        self.assertEqual(self.graph.out_neighbors(3).tolist(), [])

    def test_degrees(self):
        self.assertEqual(self.graph.in_degree.tolist(), [0, 1, 0, 3])
        self.assertEqual(self.graph.out_degree.tolist(), [2, 1, 1, 0])


class BarabasiAlbertTests(SimpleTestCase):

    def test_seed_clique_only(self):
        graph = generate_barabasi_albert(3, 2, rng_seed=1)
        self.assertEqual(graph.n, 3)
        self.assertEqual(graph.edge_count, 6)

    def test_edge_count(self):
        graph = generate_barabasi_albert(50, 2, rng_seed=7)
        self.assertEqual(graph.n, 50)
        self.assertEqual(graph.edge_count, 2 * (2 * 50 - 3))

    def test_deterministic_under_seed(self):
        self.assertEqual(generate_barabasi_albert(60, 2, 3), generate_barabasi_albert(60, 2, 3))

    def test_symmetric_storage(self):
        graph = generate_barabasi_albert(30, 2, 5)
        forward = set(zip(graph.sources.tolist(), graph.targets.tolist()))
        self.assertEqual(forward, {(v, u) for u, v in forward})

    def test_rejects_small_n(self):
        with self.assertRaises(ValidationError) as ctx:
            generate_barabasi_albert(2, 2, 0)
        self.assertEqual(ctx.exception.code, 'argument')


class WeightTests(SimpleTestCase):

    def setUp(self):
        self.graph = generate_barabasi_albert(40, 2, rng_seed=11)

    def test_weights_within_bound(self):
        for w_max in (0.4, 0.2):
            weighted = assign_uniform_weights(self.graph, w_max, rng_seed=2)
            self.assertTrue(weighted.has_weights)
            self.assertLessEqual(weighted.weights.max(), w_max)
            self.assertGreaterEqual(weighted.weights.min(), 0.0)

    def test_weights_deterministic(self):
        first = assign_uniform_weights(self.graph, 0.4, rng_seed=9)
        second = assign_uniform_weights(self.graph, 0.4, rng_seed=9)
        self.assertTrue(np.array_equal(first.weights, second.weights))

    def test_rejects_bad_bound(self):
        with self.assertRaises(ValidationError):
            assign_uniform_weights(self.graph, 0.0, rng_seed=1)

    def test_scale_in_weights_caps_sums(self):
        graph = load_edge_list("a c 0.8\nb c 0.6\na b 0.5\n")
        scaled = scale_in_weights(graph)
        sums = np.bincount(scaled.targets, weights=scaled.weights, minlength=scaled.n)
        self.assertAlmostEqual(sums[graph.label_index['c']], 1.0)
        self.assertAlmostEqual(sums[graph.label_index['b']], 0.5)


class CommunityTests(SimpleTestCase):

    def setUp(self):
        self.graph = generate_barabasi_albert(103, 2, rng_seed=4)

    def test_singleton(self):
        graph = generate_barabasi_albert(5, 2, 0)
        structure = build_communities(graph, 'singleton')
        self.assertEqual(structure.m, 5)
        self.assertTrue(all(len(community) == 1 for community in structure))

    def test_bfs_single_community_is_everything(self):
        structure = build_communities(self.graph, 'bfs', 1, rng_seed=3)
        self.assertEqual(structure.as_sets(), [frozenset(range(self.graph.n))])

    def test_bfs_sizes_and_partition(self):
        structure = build_communities(self.graph, 'bfs', 10, rng_seed=3)
        self.assertEqual(sorted(structure.sizes.tolist()), [10] * 7 + [11] * 3)
        self.assertEqual(structure.sizes[:3].tolist(), [11, 11, 11])
        covered = np.concatenate(structure.members)
        self.assertEqual(sorted(covered.tolist()), list(range(self.graph.n)))

    def test_bfs_restarts_on_disconnected_graph(self):
        graph = Graph(6, [0, 1], [1, 0])
        structure = build_communities(graph, 'bfs', 2, rng_seed=0)
        self.assertEqual(structure.sizes.tolist(), [3, 3])

    def test_random_partition(self):
        structure = build_communities(self.graph, 'random', 4, rng_seed=8)
        covered = np.concatenate(structure.members)
        self.assertEqual(sorted(covered.tolist()), list(range(self.graph.n)))

    def test_too_many_communities(self):
        with self.assertRaises(ValidationError) as ctx:
            build_communities(self.graph, 'bfs', self.graph.n + 1, rng_seed=0)
        self.assertEqual(ctx.exception.code, 'argument')

    def test_random_overlap_frequencies(self):
        n, m = 20000, 10
        graph = Graph(n, [], [])
        structure = build_communities(graph, 'random_overlap', m, rng_seed=21)
        counts = np.zeros(n, dtype=int)
        for community in structure:
            counts[community] += 1
        p = 1.0 / (m + 2)
        stderr = np.sqrt(p * (1 - p) / n)
        self.assertLess(abs(np.mean(counts == 0) - p), 4 * stderr)
        self.assertLess(abs(np.mean(counts == m) - p), 4 * stderr)
        for community in structure:
            exclusive = np.mean(counts[community] == 1) * len(community) / n
            self.assertLess(abs(exclusive - p), 4 * stderr)

    def test_deterministic_under_seed(self):
        first = build_communities(self.graph, 'random_overlap', 5, rng_seed=6)
        second = build_communities(self.graph, 'random_overlap', 5, rng_seed=6)
        self.assertEqual(first, second)


class CommunityFileTests(SimpleTestCase):

    def setUp(self):
        self.graph = load_edge_list("0 1\n1 2\n2 0\n")

    def test_parse_overlapping(self):
        structure = load_communities("0 A\n1 A\n1 B\n", self.graph)
        self.assertEqual(structure.names, ('A', 'B'))
        self.assertEqual(structure.as_sets(), [frozenset({0, 1}), frozenset({1})])

    def test_empty_file(self):
        with self.assertRaises(ValidationError) as ctx:
            load_communities("", self.graph)
        self.assertEqual(ctx.exception.code, 'empty')

    def test_partial_cover_is_valid(self):
        structure = load_communities("2 X\n", self.graph)
        self.assertEqual(structure.m, 1)

    def test_unknown_node(self):
        with self.assertRaises(ValidationError) as ctx:
            load_communities("7 A\n", self.graph)
        self.assertEqual(ctx.exception.code, 'unknown_node')
        self.assertIn("'7'", ctx.exception.message)

    def test_structure_rejects_empty_community(self):
        with self.assertRaises(ValidationError):
            CommunityStructure([[0], []], 3)


class ComponentTests(SimpleTestCase):

    def test_largest_weak_component(self):
        graph = load_edge_list("a b 0.1\nc b 0.2\nd e 0.3\n")
        component, kept = largest_weakly_connected_component(graph)
        self.assertEqual(kept.tolist(), [0, 1, 2])
        self.assertEqual(component.labels, ('a', 'b', 'c'))
        self.assertEqual(component.edge_count, 2)
