import json
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from diffusion.utils import build_sample, enumerate_live_edge_graphs
from fixtures.utils import build_fixture
from graph_core.utils import (
    assign_uniform_weights,
    build_communities,
    load_communities,
    load_edge_list,
    scale_in_weights,
)
from harness.serializers import load_config
from harness.utils import (
    confidence_interval,
    derive_seed,
    emit_csv,
    evaluate_solution,
    record_report,
    run_experiment,
)
from solutions.serializers import load_solution


def _read(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise CommandError(f"Cannot read {path}: {exc}")


def _read_json(path):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise CommandError(f"{path} is not JSON: {exc}")


def _parse_param(text):
    """key=value with JSON values, bare strings otherwise"""
    if '=' not in text:
        raise CommandError(f"Expected key=value, got {text!r}.")
    key, raw = text.split('=', 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _error_text(exc):
    if isinstance(exc, ValidationError):
        return '; '.join(exc.messages)
    if isinstance(exc, serializers.ValidationError):
        return json.dumps(exc.detail, default=str)
    return str(exc)


class Command(BaseCommand):
    help = "Fair influence maximization: run experiments, check theory fixtures, evaluate solutions"

    def add_arguments(self, parser):
        actions = parser.add_subparsers(dest='action', required=True)

        run = actions.add_parser('run', help="Run an experiment configuration")
        run.add_argument('--config', help="JSON configuration document")
        run.add_argument('--preset', help="Start from a named preset, e.g. random_singleton")
        run.add_argument('--out', help="CSV path (default: <name>.csv)")
        run.add_argument('--workers', type=int, help="Worker threads (default: FAIRSPREAD_WORKERS)")
        run.add_argument('--record', action='store_true', help="Store the run in the database")
        run.add_argument('--no-timing', action='store_true', help="Leave runtime_s empty in the CSV")

        fixture = actions.add_parser('fixture', help="Build a theory instance")
        fixture.add_argument('name')
        fixture.add_argument('--check', action='store_true', help="List the verified facts")
        fixture.add_argument('--param', action='append', default=[], metavar='KEY=VALUE')

        evaluate = actions.add_parser('eval', help="Evaluate a solution on a graph")
        evaluate.add_argument('--graph', required=True)
        evaluate.add_argument('--communities', help="node_id community_id file (default: singletons)")
        evaluate.add_argument('--solution', required=True, help="Solution JSON document")
        evaluate.add_argument('--undirected', action='store_true')
        evaluate.add_argument('--model', default='IC', choices=['IC', 'LT'])
        evaluate.add_argument('--samples', type=int, help="Live-edge graphs (default: EVALUATION_SAMPLES)")
        evaluate.add_argument('--seed', type=int, default=0)
        evaluate.add_argument('--w-max', type=float, default=0.4, help="Weights are drawn from [0, w_max] when the file has none")
        evaluate.add_argument('--exact', action='store_true', help="Enumerate the IC outcome space")

    def handle(self, *args, **options):
        handler = getattr(self, f"handle_{options['action']}")
        try:
            handler(options)
        except (ValidationError, serializers.ValidationError) as exc:
            raise CommandError(_error_text(exc))

    def handle_run(self, options):
        if not options['config'] and not options['preset']:
            raise CommandError("run needs --config or --preset.")
        data = _read_json(options['config']) if options['config'] else {}
        if options['preset']:
            data.setdefault('preset', options['preset'])
        config = load_config(data)

        report = run_experiment(config, workers=options['workers'])
        out = options['out'] or f"{config.name}.csv"
        emit_csv(report, out, timings=not options['no_timing'])

        for algorithm, eta in report.keys():
            cells = report.cells_for(algorithm, eta)
            coverage, coverage_ci = confidence_interval([cell.coverage_ratio for cell in cells])
            violation, _ = confidence_interval([cell.violation_additive for cell in cells])
            label = f"{algorithm}_{eta}" if eta else algorithm
            if coverage is None:
                self.stdout.write(self.style.ERROR(f"{label:<20} all {len(cells)} cells failed"))
                continue
            spread = f" ± {coverage_ci:.4f}" if coverage_ci is not None else ''
            self.stdout.write(f"{label:<20} coverage {coverage:.4f}{spread}  violation {violation:.4f}")

        if options['record']:
            run = record_report(report, config, csv_path=out)
            self.stdout.write(f"Recorded run {run.pk}")
        failed = len(report.failed_cells)
        style = self.style.WARNING if failed else self.style.SUCCESS
        self.stdout.write(style(f"Wrote {out} ({len(report.cells)} cells, {failed} failed)"))

    def handle_fixture(self, options):
        params = dict(_parse_param(text) for text in options['param'])
        try:
            instance = build_fixture(options['name'], **params)
        except ValidationError as exc:
            if exc.code == 'fact':
                self.stdout.write(self.style.ERROR(exc.message))
            raise

        self.stdout.write(repr(instance))
        if not options['check']:
            return
        if not instance.verified:
            self.stdout.write(self.style.ERROR("Too large to verify by enumeration; facts unchecked."))
            raise CommandError(f"Cannot check {instance.name!r} at these parameters.")
        for check in instance.checks:
            self.stdout.write(f"  {check.label:<32} expected {check.expected:.10g}  observed {check.observed:.10g}")
        self.stdout.write(self.style.SUCCESS(f"All {len(instance.checks)} facts verified"))

    def handle_eval(self, options):
        graph = load_edge_list(_read(options['graph']), directed=not options['undirected'])
        if not graph.has_weights:
            graph = assign_uniform_weights(graph, options['w_max'], derive_seed(options['seed'], 'instance', extra=1))
        if options['model'] == 'LT':
            graph = scale_in_weights(graph)
        if options['communities']:
            communities = load_communities(_read(options['communities']), graph)
        else:
            communities = build_communities(graph, 'singleton')
        solution = load_solution(_read_json(options['solution']))

        if options['exact']:
            sample = enumerate_live_edge_graphs(graph)
        else:
            count = options['samples'] or settings.FAIRSPREAD['EVALUATION_SAMPLES']
            sample = build_sample(graph, options['model'], count, options['seed'])
        result = evaluate_solution(sample, communities, solution, rng_seed=options['seed'], exact=options['exact'])

        self.stdout.write(json.dumps({
            'spread': float(result.coverage.sum()),
            'coverage_ratio': result.coverage_ratio,
            'violation_additive': result.violation_additive,
            'violation_multiplicative': result.violation_multiplicative,
            'min_group_coverage': result.min_group_coverage,
            'group_coverages': dict(zip(communities.names, map(float, result.group_coverages))),
        }, indent=2))
