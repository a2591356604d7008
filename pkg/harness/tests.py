import json
import os
import tempfile
from io import StringIO
from pathlib import Path
from unittest import skipUnless

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from pandas.testing import assert_frame_equal
from rest_framework import serializers

from diffusion.utils import enumerate_live_edge_graphs
from fixtures.utils import star_instance, two_node_instance
from solutions.types import IndependentSolution, SeedSet

from .models import ExperimentRun, RunRecord
from .serializers import load_config
from .types import CSV_COLUMNS, AlgorithmSpec, EvaluationReport, ExperimentConfig, ReportCell
from .utils import (
    confidence_interval,
    derive_seed,
    emit_csv,
    evaluate_solution,
    read_csv,
    record_report,
    report_frame,
    run_experiment,
)


def small_config(**overrides):
    data = {
        'name': 'small',
        'instance': {'kind': 'barabasi_albert', 'n': 12, 'm_attach': 2},
        'k': 2,
        'algorithms': [
            {'id': 'grdy_im'},
            {'id': 'uniform'},
            {'id': 'grdy_grp+lp', 'etas': ['0', 'x/8']},
        ],
        'algorithm_samples': 40,
        'evaluation_samples': 20,
        'repetitions': 2,
        'seed': 7,
    }
    data.update(overrides)
    return load_config(data)


def star_config(**overrides):
    data = {
        'name': 'star',
        'instance': {'kind': 'fixture', 'name': 'star'},
        'algorithms': [{'id': 'grdy_im'}, {'id': 'grdy_grp+lp', 'etas': ['0']}],
        'exact': True,
    }
    data.update(overrides)
    return load_config(data)


def manual_report(algorithms=('alpha', 'beta'), repetitions=2):
    specs = tuple(AlgorithmSpec(algorithm, ('',)) for algorithm in algorithms)
    cells = []
    for rep in range(repetitions):
        for position, algorithm in enumerate(algorithms):
            cells.append(ReportCell(
                algorithm, '', 0, rep, seed=1000 + rep,
                coverage_ratio=0.1 + 0.2 * rep + position / 3,
                violation_additive=0.3 - 0.1 * rep,
                violation_multiplicative=1 / 7 + rep / 11,
                runtime_s=0.01 * (rep + 1),
            ))
    return EvaluationReport('manual', repetitions, 1, specs, cells)


class DeriveSeedTests(SimpleTestCase):

    def test_deterministic(self):
        self.assertEqual(derive_seed(3, 'algorithm', 1, 2), derive_seed(3, 'algorithm', 1, 2))

    def test_streams_are_disjoint(self):
        seeds = {derive_seed(3, stream, 0, 0) for stream in ('instance', 'algorithm', 'evaluation', 'independent')}
        self.assertEqual(len(seeds), 4)

    def test_repetitions_differ(self):
        self.assertNotEqual(derive_seed(0, 'evaluation', 0, 0), derive_seed(0, 'evaluation', 0, 1))

    def test_unknown_stream(self):
        with self.assertRaises(ValidationError) as ctx:
            derive_seed(0, 'plot')
        self.assertEqual(ctx.exception.code, 'argument')


class ConfidenceIntervalTests(SimpleTestCase):

    def test_two_point(self):
        mean, half = confidence_interval([0.0, 1.0])
        self.assertAlmostEqual(mean, 0.5)
        self.assertAlmostEqual(half, 1.959964 * 0.5 / np.sqrt(2), places=5)
        self.assertAlmostEqual(half, 0.693, places=3)

    def test_constant(self):
        self.assertEqual(confidence_interval([0.5] * 6), (0.5, 0.0))

    def test_single_value_has_no_width(self):
        self.assertEqual(confidence_interval([0.25]), (0.25, None))

    def test_empty(self):
        self.assertEqual(confidence_interval([]), (None, None))

    def test_none_values_are_skipped(self):
        self.assertEqual(confidence_interval([1.0, None, 1.0]), (1.0, 0.0))

    def test_standard_normal(self):
        values = np.random.default_rng(0).standard_normal(50)
        _, half = confidence_interval(values)
        self.assertAlmostEqual(half, 0.277, delta=0.3 * 0.277)


class EvaluateSolutionTests(SimpleTestCase):

    def setUp(self):
        self.instance = star_instance(10, 0.1)
        self.sample = enumerate_live_edge_graphs(self.instance.graph)

    def test_hub_seed_set(self):
        result = evaluate_solution(self.sample, self.instance.communities, SeedSet((0,), 1))
        self.assertAlmostEqual(result.coverage_ratio, 2.1 / 11)
        self.assertAlmostEqual(result.violation_additive, 0.89)
        self.assertAlmostEqual(result.violation_multiplicative, 0.11)
        self.assertAlmostEqual(result.min_group_coverage, 0.11)
        self.assertEqual(result.group_coverages.shape, (11,))

    def test_fair_distribution(self):
        solution = self.instance.solutions['fair_distribution']
        result = evaluate_solution(self.sample, self.instance.communities, solution)
        self.assertLessEqual(result.violation_additive, 1e-9)
        self.assertAlmostEqual(result.coverage_ratio * 11, 11 / 9.9)

    def test_independent_exact_matches_seed_set(self):
        x = np.zeros(11)
        x[0] = 1.0
        result = evaluate_solution(self.sample, self.instance.communities, IndependentSolution(x, 1), exact=True)
        self.assertAlmostEqual(result.coverage_ratio, 2.1 / 11)

    def test_independent_draws_are_seeded(self):
        instance = two_node_instance()
        sample = enumerate_live_edge_graphs(instance.graph)
        solution = instance.solutions['fair_independent']
        first = evaluate_solution(sample, instance.communities, solution, draws=150, rng_seed=5)
        second = evaluate_solution(sample, instance.communities, solution, draws=150, rng_seed=5)
        np.testing.assert_array_equal(first.coverage, second.coverage)
        self.assertGreaterEqual(first.coverage_ratio, 0.0)
        self.assertLessEqual(first.coverage_ratio, 1.0)

    def test_unknown_solution(self):
        with self.assertRaises(ValidationError) as ctx:
            evaluate_solution(self.sample, self.instance.communities, [0])
        self.assertEqual(ctx.exception.code, 'argument')


class ConfigTests(SimpleTestCase):

    def test_defaults_from_settings(self):
        config = load_config({
            'instance': {'kind': 'barabasi_albert', 'n': 20},
            'k': 3,
            'algorithms': [{'id': 'grdy_im'}, {'id': 'ind_lp'}],
        })
        self.assertEqual(config.algorithm_samples, 1000)
        self.assertEqual(config.evaluation_samples, 100)
        self.assertEqual(config.independent_draws, 150)
        self.assertEqual(config.communities, {'scheme': 'singleton'})
        self.assertEqual(config.algorithms[0].etas, ('',))
        self.assertEqual(config.algorithms[1].etas, ('0',))

    def test_fixture_defaults(self):
        config = star_config()
        self.assertIsNone(config.k)
        self.assertEqual(config.communities['scheme'], 'fixture')

    def test_preset(self):
        config = load_config({'preset': 'random_singleton', 'repetitions': 2})
        self.assertEqual(config.k, 25)
        self.assertEqual(config.instances, 5)
        self.assertEqual(config.repetitions, 2)
        self.assertEqual(len(config.algorithms), 9)
        self.assertTrue(config.relative_presets)

    def test_unknown_preset(self):
        with self.assertRaises(serializers.ValidationError):
            load_config({'preset': 'arenas'})

    def test_k_required(self):
        with self.assertRaises(serializers.ValidationError) as ctx:
            load_config({'instance': {'kind': 'barabasi_albert', 'n': 20}, 'algorithms': [{'id': 'grdy_im'}]})
        self.assertIn('k', ctx.exception.detail)

    def test_relative_preset_needs_greedy(self):
        with self.assertRaises(serializers.ValidationError) as ctx:
            small_config(algorithms=[{'id': 'maxmin+lp', 'etas': ['x/4']}])
        self.assertIn('algorithms', ctx.exception.detail)

    def test_eta_on_plain_algorithm(self):
        with self.assertRaises(serializers.ValidationError):
            small_config(algorithms=[{'id': 'myopic', 'etas': ['0']}])

    def test_ind_lp_eta_one(self):
        with self.assertRaises(serializers.ValidationError):
            small_config(algorithms=[{'id': 'ind_lp', 'etas': ['1']}])

    def test_duplicate_algorithm(self):
        with self.assertRaises(serializers.ValidationError):
            small_config(algorithms=[{'id': 'uniform'}, {'id': 'uniform'}])

    def test_exact_needs_ic(self):
        with self.assertRaises(serializers.ValidationError) as ctx:
            small_config(model='LT', exact=True)
        self.assertIn('exact', ctx.exception.detail)

    def test_fixture_communities_need_fixture(self):
        with self.assertRaises(serializers.ValidationError):
            small_config(communities={'scheme': 'fixture'})


class RunExperimentTests(SimpleTestCase):

    def test_star_fair_distribution(self):
        report = run_experiment(star_config())
        self.assertEqual(report.failed_cells, [])
        hub, = report.cells_for('grdy_im', '')
        fair, = report.cells_for('grdy_grp+lp', '0')
        self.assertAlmostEqual(hub.coverage_ratio * 11, 2.1)
        self.assertAlmostEqual(hub.violation_additive, 0.89)
        self.assertLessEqual(fair.violation_additive, 1e-6)
        self.assertGreaterEqual(fair.coverage_ratio * 11, 11 / 9.9 - 1e-4)
        self.assertEqual(fair.eta_value, 0.0)

    def test_relative_eta_reads_greedy_violation(self):
        config = star_config(algorithms=[{'id': 'grdy_grp+lp', 'etas': ['x/4']}, {'id': 'grdy_im'}])
        report = run_experiment(config)
        relaxed, = report.cells_for('grdy_grp+lp', 'x/4')
        self.assertAlmostEqual(relaxed.eta_value, 0.89 / 4)
        self.assertLessEqual(relaxed.violation_additive, 0.89 / 4 + 1e-6)
        self.assertEqual([cell.algorithm for cell in report.cells], ['grdy_grp+lp', 'grdy_im'])

    def test_failed_cell_is_recorded(self):
        config = ExperimentConfig(
            name='broken',
            instance={'kind': 'fixture', 'name': 'star', 'params': {}},
            communities={'scheme': 'fixture'},
            algorithms=(AlgorithmSpec('ind_lp', ('x/16',)), AlgorithmSpec('uniform', ('',))),
            exact=True,
        )
        report = run_experiment(config)
        failed, = report.failed_cells
        self.assertEqual(failed.algorithm, 'ind_lp')
        self.assertIsNone(failed.coverage_ratio)
        self.assertIn('ValidationError', failed.error)
        uniform, = report.cells_for('uniform', '')
        self.assertFalse(uniform.failed)
        self.assertAlmostEqual(uniform.coverage_ratio * 11, 12 / 11)

    def test_report_shape(self):
        report = run_experiment(small_config())
        self.assertEqual(len(report.cells), 2 * 4)
        self.assertEqual(report.keys(), [('grdy_im', ''), ('uniform', ''), ('grdy_grp+lp', '0'), ('grdy_grp+lp', 'x/8')])
        for cell in report.cells:
            self.assertFalse(cell.failed, cell.error)
            self.assertGreaterEqual(cell.coverage_ratio, 0.0)
            self.assertLessEqual(cell.coverage_ratio, 1.0)
            self.assertGreaterEqual(cell.violation_additive, 0.0)
            self.assertLessEqual(cell.violation_additive, 1.0)
            self.assertGreaterEqual(cell.runtime_s, 0.0)

    def test_repeated_runs_write_identical_csv(self):
        config = small_config(repetitions=1)
        with tempfile.TemporaryDirectory() as tmp:
            first, second, parallel = (Path(tmp) / name for name in ('a.csv', 'b.csv', 'c.csv'))
            emit_csv(run_experiment(config), first, timings=False)
            emit_csv(run_experiment(config), second, timings=False)
            emit_csv(run_experiment(small_config(), workers=2), parallel, timings=False)
            self.assertEqual(first.read_bytes(), second.read_bytes())

            sequential = Path(tmp) / 'd.csv'
            emit_csv(run_experiment(small_config(), workers=1), sequential, timings=False)
            self.assertEqual(parallel.read_bytes(), sequential.read_bytes())

    def test_seed_changes_results(self):
        first = run_experiment(small_config(repetitions=1, seed=1))
        second = run_experiment(small_config(repetitions=1, seed=2))
        self.assertNotEqual(
            [cell.seed for cell in first.cells], [cell.seed for cell in second.cells]
        )


@skipUnless(os.environ.get('FAIRSPREAD_SLOW_TESTS'), "set FAIRSPREAD_SLOW_TESTS=1 to run the desk-scale experiment")
class RandomSingletonTests(SimpleTestCase):
    """One graph of the random_singleton preset with the full sample sizes"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        config = load_config({
            'preset': 'random_singleton',
            'instances': 1,
            'repetitions': 1,
            'algorithms': [
                {'id': 'grdy_im'},
                {'id': 'ind_lp', 'etas': ['0']},
                {'id': 'grdy_grp+lp', 'etas': ['0', 'x/4']},
            ],
        })
        cls.report = run_experiment(config)

    def cell(self, algorithm, eta=''):
        cell, = self.report.cells_for(algorithm, eta)
        self.assertFalse(cell.failed, cell.error)
        return cell

    def test_greedy_is_unfair(self):
        self.assertGreaterEqual(self.cell('grdy_im').violation_additive, 0.9)

    def test_exact_parity_gives_no_coverage(self):
        for algorithm in ('ind_lp', 'grdy_grp+lp'):
            cell = self.cell(algorithm, '0')
            self.assertLessEqual(cell.coverage_ratio, 0.02)
            self.assertLessEqual(cell.violation_additive, 0.05)

    def test_relaxed_parity_trades_coverage_for_violation(self):
        greedy = self.cell('grdy_im')
        relaxed = self.cell('grdy_grp+lp', 'x/4')
        self.assertGreaterEqual(relaxed.coverage_ratio, 0.6 * greedy.coverage_ratio)
        self.assertLessEqual(relaxed.violation_additive, 0.6 * greedy.violation_additive)


class CsvTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / 'report.csv'

    def tearDown(self):
        self.tmp.cleanup()

    def test_header_only_for_no_algorithms(self):
        emit_csv(EvaluationReport('empty', 1, 1), self.path)
        self.assertEqual(self.path.read_text(encoding='utf-8'), ','.join(CSV_COLUMNS) + '\n')

    def test_rows_and_aggregates(self):
        frame = emit_csv(manual_report(), self.path)
        self.assertEqual(list(frame.columns), list(CSV_COLUMNS))
        self.assertEqual(len(frame), 4 + 2 * 2)
        self.assertEqual(list(frame['rep'][:4]), ['0', '0', '1', '1'])
        aggregates = frame[frame['rep'].isin(['mean', 'ci95'])]
        self.assertEqual(list(aggregates['algorithm']), ['alpha', 'alpha', 'beta', 'beta'])
        alpha_mean = aggregates.iloc[0]
        self.assertAlmostEqual(alpha_mean['violation_additive'], 0.25)
        self.assertAlmostEqual(alpha_mean['coverage_ratio'], 0.2)

    def test_round_trip(self):
        report = manual_report()
        emit_csv(report, self.path)
        assert_frame_equal(read_csv(self.path), report_frame(report))

    def test_failed_cell_keeps_its_row(self):
        report = manual_report(repetitions=3)
        report.cells[0].coverage_ratio = None
        report.cells[0].error = 'LpSolveError: infeasible'
        emit_csv(report, self.path)
        frame = read_csv(self.path)
        self.assertEqual(len(frame), 6 + 4)
        self.assertTrue(np.isnan(frame['coverage_ratio'][0]))

    def test_global_rep_counts_across_instances(self):
        spec = AlgorithmSpec('alpha', ('',))
        cells = [ReportCell('alpha', '', instance, rep, seed=0, coverage_ratio=0.5)
                 for instance in range(2) for rep in range(2)]
        frame = report_frame(EvaluationReport('multi', 2, 2, (spec,), cells))
        self.assertEqual(list(frame['rep'][:4]), ['0', '1', '2', '3'])

    def test_timings_can_be_left_out(self):
        frame = emit_csv(manual_report(), self.path, timings=False)
        self.assertTrue(frame['runtime_s'].isna().all())


class RecordReportTests(TestCase):

    def test_record(self):
        config = star_config()
        report = run_experiment(config)
        run = record_report(report, config, csv_path='star.csv')
        self.assertEqual(ExperimentRun.objects.count(), 1)
        self.assertEqual(run.records.count(), len(report.cells))
        self.assertEqual(run.failed_cells, 0)
        self.assertEqual(run.config['instance']['name'], 'star')
        record = RunRecord.objects.get(algorithm='grdy_im')
        self.assertAlmostEqual(record.coverage_ratio * 11, 2.1)
        self.assertEqual(len(record.group_coverages), 11)


class CommandTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def call(self, *args):
        out = StringIO()
        call_command('fairspread', *args, stdout=out)
        return out.getvalue()

    def test_fixture_check(self):
        output = self.call('fixture', 'star', '--check')
        self.assertIn('hub_spread', output)
        self.assertIn('All 5 facts verified', output)

    def test_fixture_params(self):
        output = self.call('fixture', 'bipartite_blowup', '--param', 'N=4')
        self.assertIn('bipartite_blowup', output)

    def test_fixture_check_fails_when_unverified(self):
        with self.assertLogs('fixtures.utils', level='WARNING'):
            with self.assertRaises(CommandError):
                self.call('fixture', 'star', '--check', '--param', 'N=25')

    def test_fixture_without_check_accepts_large_instance(self):
        with self.assertLogs('fixtures.utils', level='WARNING'):
            output = self.call('fixture', 'star', '--param', 'N=25')
        self.assertIn('star', output)

    def test_unknown_fixture(self):
        with self.assertRaises(CommandError):
            self.call('fixture', 'ring')

    def test_run_writes_csv_and_records(self):
        config = self.root / 'star.json'
        config.write_text(json.dumps({
            'name': 'star',
            'instance': {'kind': 'fixture', 'name': 'star'},
            'algorithms': [{'id': 'grdy_im'}, {'id': 'uniform'}],
            'exact': True,
        }), encoding='utf-8')
        out = self.root / 'star.csv'
        output = self.call('run', '--config', str(config), '--out', str(out), '--record', '--no-timing')
        self.assertIn('Wrote', output)
        self.assertTrue(out.exists())
        self.assertEqual(len(read_csv(out)), 2 + 2 * 2)
        self.assertEqual(ExperimentRun.objects.get().records.count(), 2)

    def test_run_needs_config(self):
        with self.assertRaises(CommandError):
            self.call('run')

    def test_run_rejects_invalid_config(self):
        config = self.root / 'bad.json'
        config.write_text(json.dumps({'instance': {'kind': 'barabasi_albert', 'n': 20}, 'algorithms': []}))
        with self.assertRaises(CommandError):
            self.call('run', '--config', str(config))

    def test_eval(self):
        graph = self.root / 'graph.txt'
        graph.write_text("a b 0.5\n", encoding='utf-8')
        solution = self.root / 'solution.json'
        solution.write_text(json.dumps({'kind': 'seed_set', 'nodes': [0], 'k': 1}), encoding='utf-8')
        output = self.call('eval', '--graph', str(graph), '--solution', str(solution), '--exact')
        result = json.loads(output)
        self.assertAlmostEqual(result['spread'], 1.5)
        self.assertAlmostEqual(result['coverage_ratio'], 0.75)
        self.assertAlmostEqual(result['violation_additive'], 0.5)
        self.assertEqual(result['group_coverages'], {'a': 1.0, 'b': 0.5})

    def test_eval_unweighted_graph_gets_uniform_weights(self):
        graph = self.root / 'graph.txt'
        graph.write_text("a b\n", encoding='utf-8')
        solution = self.root / 'solution.json'
        solution.write_text(json.dumps({'kind': 'seed_set', 'nodes': [0], 'k': 1}), encoding='utf-8')
        first = json.loads(self.call('eval', '--graph', str(graph), '--solution', str(solution), '--exact'))
        second = json.loads(self.call('eval', '--graph', str(graph), '--solution', str(solution), '--exact'))
        self.assertGreaterEqual(first['spread'], 1.0)
        self.assertLessEqual(first['spread'], 1.4)
        self.assertEqual(first, second)
        narrow = json.loads(self.call(
            'eval', '--graph', str(graph), '--solution', str(solution), '--exact', '--w-max', '0.1',
        ))
        self.assertLessEqual(narrow['spread'], 1.1)

    def test_eval_bad_solution(self):
        graph = self.root / 'graph.txt'
        graph.write_text("a b 0.5\n", encoding='utf-8')
        solution = self.root / 'solution.json'
        solution.write_text(json.dumps({'kind': 'seed_set', 'nodes': [0, 1], 'k': 1}), encoding='utf-8')
        with self.assertRaises(CommandError):
            self.call('eval', '--graph', str(graph), '--solution', str(solution))
