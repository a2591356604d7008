import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from .types import LinearProgram, LpStatus
from .utils import constraint_violation, solve


class SolveTests(SimpleTestCase):

    def test_single_bound(self):
        lp = LinearProgram('single')
        x = lp.add_variable(0.0, 10.0, objective=1.0, name='x')
        lp.add_constraint([x], [1.0], '<=', 3.0)
        result = solve(lp)
        self.assertTrue(result.ok)
        self.assertAlmostEqual(result.x[x], 3.0, places=6)
        self.assertAlmostEqual(result.objective, 3.0, places=6)

    def test_degenerate_optimum(self):
        lp = LinearProgram('degenerate')
        xs = lp.add_variables(2, 0.0, 1.0, objective=1.0)
        lp.add_constraint(xs, 1.0, '<=', 1.0)
        result = solve(lp)
        self.assertEqual(result.status, LpStatus.OPTIMAL)
        self.assertAlmostEqual(result.objective, 1.0, places=6)
        self.assertLessEqual(result.x.sum(), 1.0 + 1e-6)

    def test_two_node_fair_lp(self):
        # a -> b with weight 3/4, coverage of a must equal coverage of b
        lp = LinearProgram('two_node')
        a, b = lp.add_variables(2, 0.0, 1.0, objective=[1.75, 1.0])
        lp.add_constraint([a, b], [1.0, 1.0], '<=', 1.0, name='budget')
        lp.add_constraint([a, b], [0.25, -1.0], '=', 0.0, name='fair')
        result = solve(lp)
        self.assertTrue(result.ok)
        self.assertTrue(np.allclose(result.x, [0.8, 0.2], atol=1e-6))
        self.assertAlmostEqual(result.objective, 1.6, places=6)

    def test_bulk_rows(self):
        lp = LinearProgram('bulk')
        xs = lp.add_variables(3, 0.0, 1.0, objective=[1.0, 2.0, 3.0])
        # x0 + x1 <= 1 and x1 + x2 <= 1
        lp.add_constraints([0, 0, 1, 1], [xs[0], xs[1], xs[1], xs[2]], [1, 1, 1, 1], ['<=', '<='], [1.0, 1.0])
        result = solve(lp)
        self.assertTrue(result.ok)
        self.assertAlmostEqual(result.objective, 4.0, places=6)
        self.assertTrue(np.allclose(result.x, [1.0, 0.0, 1.0], atol=1e-6))

    def test_greater_equal_rows(self):
        lp = LinearProgram('ge')
        x, y = lp.add_variables(2, 0.0, 1.0, objective=[-1.0, -1.0])
        lp.add_constraint([x, y], [1.0, 2.0], '>=', 1.0)
        result = solve(lp)
        self.assertTrue(result.ok)
        self.assertAlmostEqual(result.objective, -0.5, places=6)
        self.assertLessEqual(constraint_violation(lp, result.x), 1e-6)

    def test_infeasible(self):
        lp = LinearProgram('infeasible')
        xs = lp.add_variables(2, 0.0, 1.0, objective=1.0)
        lp.add_constraint(xs, 1.0, '>=', 3.0)
        result = solve(lp)
        self.assertEqual(result.status, LpStatus.INFEASIBLE)
        self.assertFalse(result.ok)

    def test_unbounded_is_not_optimal(self):
        lp = LinearProgram('unbounded')
        x, y = lp.add_variables(2, objective=1.0)
        lp.add_constraint([x, y], [1.0, -1.0], '<=', 1.0)
        result = solve(lp)
        self.assertFalse(result.ok)
        self.assertIn(result.status, (LpStatus.UNBOUNDED, LpStatus.INFEASIBLE))

    def test_solve_is_deterministic(self):
        def build():
            lp = LinearProgram('repeat')
            xs = lp.add_variables(4, 0.0, 1.0, objective=1.0)
            lp.add_constraint(xs, 1.0, '<=', 2.0)
            return lp

        self.assertTrue(np.array_equal(solve(build()).x, solve(build()).x))


class LinearProgramTests(SimpleTestCase):

    def test_unknown_sense(self):
        lp = LinearProgram()
        x = lp.add_variable()
        with self.assertRaises(ValidationError) as ctx:
            lp.add_constraint([x], [1.0], '<', 1.0)
        self.assertEqual(ctx.exception.code, 'argument')

    def test_bad_reference(self):
        lp = LinearProgram()
        lp.add_variable()
        lp.add_constraint([3], [1.0], '<=', 1.0)
        with self.assertRaises(ValidationError):
            solve(lp)

    def test_bad_bounds(self):
        lp = LinearProgram()
        lp.add_variable(lower=2.0, upper=1.0)
        with self.assertRaises(ValidationError):
            lp.validate()

    def test_violation(self):
        lp = LinearProgram()
        x, y = lp.add_variables(2, 0.0, 1.0)
        lp.add_constraint([x, y], [1.0, 1.0], '<=', 1.0)
        lp.add_constraint([x], [1.0], '=', 0.5)
        self.assertAlmostEqual(constraint_violation(lp, [0.5, 0.5]), 0.0)
        self.assertAlmostEqual(constraint_violation(lp, [0.5, 0.75]), 0.25)
        self.assertAlmostEqual(constraint_violation(lp, [0.2, 0.0]), 0.3)

    def test_lp_text(self):
        lp = LinearProgram('toy')
        x = lp.add_variable(0.0, 10.0, objective=1.0, name='x')
        lp.add_constraint([x], [1.0], '<=', 3.0, name='cap')
        text = lp.to_lp_text()
        self.assertIn('Maximize', text)
        self.assertIn(' obj: + 1 x', text)
        self.assertIn(' cap: + 1 x <= 3', text)
        self.assertIn(' 0 <= x <= 10', text)
        self.assertTrue(text.endswith('End\n'))
