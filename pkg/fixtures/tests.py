import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from algorithms.fair_lp import grdy_grp_lp, ind_lp
from algorithms.greedy import grdy_im
from diffusion.utils import (
    coverage_vector,
    enumerate_live_edge_graphs,
    evaluate_distribution,
    exact_spread,
    independent_coverage_exact,
)
from solutions.utils import dp_violation_additive, dp_violation_multiplicative

from .utils import (
    FIXTURES,
    bipartite_blowup_instance,
    build_fixture,
    pof_instance,
    star_instance,
    two_node_instance,
)


class StarInstanceTests(SimpleTestCase):

    def setUp(self):
        self.instance = star_instance(10, 0.1)
        self.sample = enumerate_live_edge_graphs(self.instance.graph)

    def test_verified(self):
        self.assertTrue(self.instance.verified)
        self.assertTrue(all(check.passed for check in self.instance.checks))

    def test_facts(self):
        facts = self.instance.facts
        self.assertAlmostEqual(facts['hub_spread'], 2.1)
        self.assertAlmostEqual(facts['fair_spread'], 11 / 9.9)
        self.assertAlmostEqual(facts['hub_multiplicative_violation'], 9.0909, places=4)

    def test_labels(self):
        self.assertEqual(self.instance.graph.labels[0], 'v')
        self.assertEqual(self.instance.graph.labels[10], 'u10')

    def test_greedy_picks_hub(self):
        trace = grdy_im(self.sample, self.instance.k)
        self.assertEqual(trace.seeds, (0,))
        self.assertAlmostEqual(exact_spread(self.instance.graph, trace.seeds).total, 2.1)

    def test_maximin_point_mass_violation(self):
        coverage = evaluate_distribution(self.sample, self.instance.solutions['maximin_distribution'])
        self.assertAlmostEqual(1 / dp_violation_multiplicative(coverage.values), 10 / 1.1, delta=1e-4)

    def test_fair_heuristic_reaches_fair_spread(self):
        distribution = grdy_grp_lp(self.sample, self.instance.communities, self.instance.k, 0.0)
        coverage = evaluate_distribution(self.sample, distribution)
        self.assertLessEqual(dp_violation_additive(coverage.values), 1e-6)
        self.assertGreaterEqual(coverage.total, 11 / 9.9 - 1e-4)

    def test_arguments(self):
        with self.assertRaises(ValidationError):
            star_instance(1, 0.1)
        with self.assertRaises(ValidationError):
            star_instance(2, 1.5)
        with self.assertRaises(ValidationError):
            star_instance(10, -0.1)

    def test_degenerate_star(self):
        instance = star_instance(10, 0.0)
        self.assertTrue(instance.verified)
        self.assertAlmostEqual(instance.facts['hub_spread'], 2.0)
        self.assertAlmostEqual(instance.facts['hub_multiplicative_violation'], 10.0)
        self.assertAlmostEqual(instance.facts['fair_spread'], 1.1)

    def test_large_star_skips_verification(self):
        with self.assertLogs('fixtures.utils', level='WARNING'):
            instance = star_instance(25, 0.1)
        self.assertFalse(instance.verified)
        self.assertAlmostEqual(instance.facts['fair_spread'], 26 / 24.9)


class TwoNodeInstanceTests(SimpleTestCase):

    def setUp(self):
        self.instance = two_node_instance()
        self.sample = enumerate_live_edge_graphs(self.instance.graph)

    def test_verified(self):
        self.assertTrue(self.instance.verified)

    def test_fair_independent_solution(self):
        coverage = independent_coverage_exact(self.sample, self.instance.solutions['fair_independent'])
        self.assertAlmostEqual(coverage[0], 2 / 3)
        self.assertAlmostEqual(coverage[1], 2 / 3)

    def test_no_fair_single_seed(self):
        for node in (0, 1):
            self.assertGreater(dp_violation_additive(exact_spread(self.instance.graph, [node]).values), 0.0)
        self.assertEqual(coverage_vector(self.sample, []).total, 0.0)

    def test_ind_lp_solution(self):
        solution = ind_lp(self.sample, self.instance.communities, self.instance.k, 0.0)
        self.assertTrue(np.allclose(solution.x, [0.8, 0.2], atol=1e-4))
        coverage = independent_coverage_exact(self.sample, solution)
        self.assertGreaterEqual(coverage[1], (1 - 1 / np.e) * coverage[0])


class BipartiteBlowupTests(SimpleTestCase):

    def test_fair_distribution(self):
        instance = bipartite_blowup_instance(6)
        self.assertTrue(instance.verified)
        sample = enumerate_live_edge_graphs(instance.graph)
        coverage = evaluate_distribution(sample, instance.solutions['fair_distribution'])
        self.assertEqual(coverage.total, 4.0)

    def test_symmetric_marginals_are_unfair(self):
        instance = bipartite_blowup_instance(4)
        sample = enumerate_live_edge_graphs(instance.graph)
        coverage = independent_coverage_exact(sample, [0.3, 0.3, 0, 0, 0, 0])
        self.assertGreater(coverage[2], coverage[0])
        self.assertAlmostEqual(coverage[2], 0.3 * 1.7)


class PriceOfFairnessTests(SimpleTestCase):

    def test_facts(self):
        instance = pof_instance(20)
        self.assertTrue(instance.verified)
        self.assertEqual(instance.facts['optimum_lower_bound'], 11.0)
        self.assertEqual(instance.facts['price_of_fairness_lower_bound'], 5.5)

    def test_greedy_reaches_bound(self):
        for n in (20, 40):
            instance = pof_instance(n)
            trace = grdy_im(enumerate_live_edge_graphs(instance.graph), 1)
            self.assertAlmostEqual(trace.value, n / 2 + 1)

    def test_odd_n(self):
        with self.assertRaises(ValidationError):
            pof_instance(21)


class BuildFixtureTests(SimpleTestCase):

    def test_every_fixture_builds(self):
        for name in FIXTURES:
            self.assertTrue(build_fixture(name).verified, name)

    def test_parameters(self):
        self.assertEqual(build_fixture('pof', n=10).graph.node_count, 10)
        self.assertEqual(build_fixture('star', N=4, eps=0.5).params, {'N': 4, 'eps': 0.5})

    def test_unknown(self):
        with self.assertRaises(ValidationError) as ctx:
            build_fixture('milp')
        self.assertEqual(ctx.exception.code, 'argument')
        with self.assertRaises(ValidationError):
            build_fixture('star', size=3)
