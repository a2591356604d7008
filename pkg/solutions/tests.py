import json

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from rest_framework import serializers

from .serializers import dump_solution, load_solution
from .types import IndependentSolution, SeedSet, SetDistribution
from .utils import (
    beta_feasible,
    dp_violation_additive,
    dp_violation_multiplicative,
    eps_plus_feasible,
    expected_size,
    min_group_coverage,
)


class MetricTests(SimpleTestCase):

    def test_additive(self):
        self.assertEqual(dp_violation_additive([0.4, 0.4, 0.4]), 0.0)
        self.assertAlmostEqual(dp_violation_additive([0.3, 0.7]), 0.4)

    def test_additive_star_maximin(self):
        N, eps = 10, 0.1
        coverages = [1.0] + [(1 + eps) / N] * N
        self.assertAlmostEqual(dp_violation_additive(coverages), 1 - (1 + eps) / N)

    def test_additive_is_translation_invariant(self):
        values = np.array([0.1, 0.25, 0.3])
        self.assertAlmostEqual(dp_violation_additive(values), dp_violation_additive(values + 0.5))

    def test_multiplicative(self):
        self.assertEqual(dp_violation_multiplicative([0.5, 0.5]), 1.0)
        self.assertEqual(dp_violation_multiplicative([0.0, 0.2]), 0.0)
        self.assertEqual(dp_violation_multiplicative([0.0, 0.0]), 1.0)

    def test_multiplicative_star_maximin(self):
        N, eps = 10, 0.1
        beta = dp_violation_multiplicative([1.0] + [(1 + eps) / N] * N)
        self.assertAlmostEqual(beta, (1 + eps) / N)
        self.assertAlmostEqual(1 / beta, N / (1 + eps), places=4)

    def test_multiplicative_is_scale_invariant(self):
        values = np.array([0.1, 0.25, 0.3])
        self.assertAlmostEqual(dp_violation_multiplicative(values), dp_violation_multiplicative(values * 3))

    def test_eps_plus(self):
        self.assertTrue(eps_plus_feasible([0.2, 0.2], 0.0))
        self.assertTrue(eps_plus_feasible([0.3, 0.7], 0.4 + 1e-12))
        self.assertFalse(eps_plus_feasible([0.3, 0.7], 0.39))

    def test_beta_and_min(self):
        self.assertTrue(beta_feasible([0.5, 1.0], 0.5))
        self.assertFalse(beta_feasible([0.4, 1.0], 0.5))
        self.assertEqual(min_group_coverage([0.4, 0.1, 0.9]), 0.1)


class SolutionTypeTests(SimpleTestCase):

    def test_expected_size(self):
        self.assertEqual(expected_size(IndependentSolution(np.full(8, 3 / 8), 3)), 3.0)
        self.assertEqual(expected_size(SetDistribution([((0, 1), 0.5), ((), 0.5)], 1)), 1.0)
        self.assertEqual(expected_size(SeedSet([4, 2, 9], 3)), 3.0)

    def test_seed_set_budget(self):
        with self.assertRaises(ValidationError) as ctx:
            SeedSet([1, 2, 3], 2)
        self.assertEqual(ctx.exception.code, 'budget')

    def test_independent_budget_and_range(self):
        IndependentSolution([0.5, 0.5 + 5e-7], 1)
        with self.assertRaises(ValidationError):
            IndependentSolution([0.6, 0.6], 1)
        with self.assertRaises(ValidationError):
            IndependentSolution([1.1, 0.0], 2)

    def test_distribution_canonical_form(self):
        first = SetDistribution([((2, 1), 0.25), ((1, 2), 0.25), ((), 0.5)], 1)
        second = SetDistribution([((), 0.5), ((1, 2), 0.5)], 1)
        self.assertEqual(first, second)
        self.assertEqual(len(first), 2)

    def test_distribution_mass(self):
        with self.assertRaises(ValidationError) as ctx:
            SetDistribution([((0,), 0.5)], 1)
        self.assertEqual(ctx.exception.code, 'distribution')

    def test_distribution_budget(self):
        with self.assertRaises(ValidationError) as ctx:
            SetDistribution([((0, 1, 2), 1.0)], 2)
        self.assertEqual(ctx.exception.code, 'budget')

    def test_from_weights_drops_noise(self):
        dist = SetDistribution.from_weights([(0,), (1,), ()], [0.6, 1e-15, 0.4], 1)
        self.assertEqual([entry.nodes for entry in dist], [(), (0,)])


class SerializationTests(SimpleTestCase):

    def test_each_kind_survives_json(self):
        solutions = [
            SeedSet([3, 1], 2),
            IndependentSolution([0.25, 0.5, 0.0], 1),
            SetDistribution([((0, 2), 0.5), ((), 0.5)], 1),
        ]
        for solution in solutions:
            text = json.dumps(dump_solution(solution))
            self.assertEqual(load_solution(json.loads(text)), solution)

    def test_distribution_layout(self):
        data = dump_solution(SetDistribution([((2, 0), 0.75), ((1,), 0.25)], 2))
        self.assertEqual(data['kind'], 'distribution')
        self.assertEqual(data['support'][0], {'nodes': [0, 2], 'weight': 0.75})

    def test_rejects_bad_mass(self):
        with self.assertRaises(serializers.ValidationError):
            load_solution({'kind': 'distribution', 'k': 1, 'support': [{'nodes': [0], 'weight': 0.4}]})

    def test_rejects_duplicate_support(self):
        with self.assertRaises(serializers.ValidationError):
            load_solution({
                'kind': 'distribution', 'k': 1,
                'support': [{'nodes': [0], 'weight': 0.5}, {'nodes': [0], 'weight': 0.5}],
            })

    def test_rejects_unknown_kind(self):
        with self.assertRaises(serializers.ValidationError):
            load_solution({'kind': 'lottery'})
