# harness/utils.py
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import transaction
from scipy.stats import norm

from algorithms.registry import RELAXED_ALGORITHMS, AlgorithmContext, run_algorithm
from algorithms.types import EtaRelaxation
from diffusion.utils import (
    build_sample,
    coverage_vector,
    enumerate_live_edge_graphs,
    evaluate_distribution,
    evaluate_independent,
    group_coverage,
    independent_coverage_exact,
)
from fixtures.utils import build_fixture
from graph_core.utils import (
    assign_uniform_weights,
    build_communities,
    generate_barabasi_albert,
    largest_weakly_connected_component,
    load_communities,
    load_edge_list,
    scale_in_weights,
)
from solutions.types import IndependentSolution, SeedSet, SetDistribution
from solutions.utils import dp_violation_additive, dp_violation_multiplicative, min_group_coverage

from .models import ExperimentRun, RunRecord
from .types import CSV_COLUMNS, METRICS, EvaluationReport, ReportCell, SolutionEvaluation

logger = logging.getLogger(__name__)

STREAMS = {'instance': 1, 'algorithm': 2, 'evaluation': 3, 'independent': 4}
CONFIDENCE = 0.95


def derive_seed(base_seed, stream, instance=0, rep=0, extra=0):
    """
    Seed of one random stream, derived from the base seed

    Different (stream, instance, rep, extra) tuples give statistically
    independent generators, so algorithm and evaluation draws never share
    a stream.
    """
    if stream not in STREAMS:
        raise ValidationError(f"Unknown seed stream {stream!r}.", code='argument')
    sequence = np.random.SeedSequence([int(base_seed), STREAMS[stream], int(instance), int(rep), int(extra)])
    return int(sequence.generate_state(1)[0])


def _read_text(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ValidationError(f"Cannot read {path}: {exc}", code='parse')


def build_instance(config, index):
    """
    Build graph, communities and budget for one instance of an experiment

    Args:
        config (ExperimentConfig): validated configuration
        index (int): instance number, feeds the `instance` seed stream

    Returns:
        tuple: (Graph, CommunityStructure, k)
    """
    spec = config.instance
    communities_spec = config.communities
    seed = derive_seed(config.seed, 'instance', index)
    k = config.k
    fixture = None

    if spec['kind'] == 'barabasi_albert':
        graph = generate_barabasi_albert(spec['n'], spec.get('m_attach', 2), seed)
        graph = assign_uniform_weights(graph, config.w_max, derive_seed(config.seed, 'instance', index, extra=1))
    elif spec['kind'] == 'fixture':
        fixture = build_fixture(spec['name'], **spec.get('params', {}))
        graph = fixture.graph
        k = fixture.k if k is None else k
    else:
        graph = load_edge_list(_read_text(spec['graph']), directed=spec.get('directed', True))
        if spec.get('largest_component'):
            graph, _ = largest_weakly_connected_component(graph)
        if not graph.has_weights:
            graph = assign_uniform_weights(graph, config.w_max, derive_seed(config.seed, 'instance', index, extra=1))

    if config.model == 'LT':
        graph = scale_in_weights(graph)

    scheme = communities_spec.get('scheme', 'singleton')
    if scheme == 'fixture':
        communities = fixture.communities
    elif scheme == 'file':
        communities = load_communities(_read_text(communities_spec['path']), graph)
    else:
        communities = build_communities(
            graph, scheme, communities_spec.get('m'), derive_seed(config.seed, 'instance', index, extra=2)
        )

    logger.info("Instance %d of %s: %s, %s, k=%s", index, config.name, graph, communities, k)
    return graph, communities, k


def evaluate_solution(sample, communities, solution, draws=None, rng_seed=None, exact=False):
    """
    Measure a solution on an evaluation sample

    Seed sets and distributions are evaluated exactly on the sample; an
    independent solution is estimated with `draws` seed-set draws unless
    `exact` asks for the closed form.

    Returns:
        SolutionEvaluation
    """
    if isinstance(solution, SeedSet):
        coverage = coverage_vector(sample, solution.nodes)
    elif isinstance(solution, IndependentSolution):
        if exact:
            coverage = independent_coverage_exact(sample, solution)
        else:
            coverage = evaluate_independent(sample, solution, draws, rng_seed)
    elif isinstance(solution, SetDistribution):
        coverage = evaluate_distribution(sample, solution)
    else:
        raise ValidationError(f"Cannot evaluate {type(solution).__name__}.", code='argument')

    values = np.asarray(coverage.values, dtype=np.float64)
    groups = group_coverage(values, communities)
    n = sample.node_count
    ratio = float(np.clip(values.sum() / n, 0.0, 1.0)) if n else 0.0
    return SolutionEvaluation(
        coverage=values,
        group_coverages=groups,
        coverage_ratio=ratio,
        violation_additive=dp_violation_additive(groups),
        violation_multiplicative=dp_violation_multiplicative(groups),
        min_group_coverage=min_group_coverage(groups),
    )


def _ordered_specs(config):
    """grdy_im first, since presets relative to x read its violation"""
    specs = list(config.algorithms)
    specs.sort(key=lambda spec: spec.id != 'grdy_im')
    return specs


def _run_repetition(config, instance, rep, graph, communities, k):
    algorithm_seed = derive_seed(config.seed, 'algorithm', instance, rep)
    evaluation_seed = derive_seed(config.seed, 'evaluation', instance, rep)

    if config.exact:
        sample = enumerate_live_edge_graphs(graph)
        evaluation = sample
    else:
        sample = build_sample(graph, config.model, config.algorithm_samples, algorithm_seed)
        evaluation = build_sample(graph, config.model, config.evaluation_samples, evaluation_seed)

    context = AlgorithmContext(
        graph, sample, communities, k,
        mult_weight_iterations=config.mult_weight_iterations,
        mult_weight_step=config.mult_weight_step,
    )
    positions = {spec.id: position for position, spec in enumerate(config.algorithms)}
    reference = None
    cells = {}

    for spec in _ordered_specs(config):
        for eta_position, label in enumerate(spec.etas):
            cell = ReportCell(spec.id, label, instance, rep, seed=algorithm_seed)
            try:
                eta = None
                if spec.id in RELAXED_ALGORITHMS:
                    eta = EtaRelaxation.parse(label, reference).eta
                    cell.eta_value = eta
                start = time.perf_counter()
                solution = run_algorithm(spec.id, context, eta)
                cell.runtime_s = time.perf_counter() - start

                draw_seed = derive_seed(config.seed, 'independent', instance, rep, positions[spec.id] * 64 + eta_position)
                result = evaluate_solution(
                    evaluation, communities, solution, config.independent_draws, draw_seed, exact=config.exact
                )
            except Exception as exc:
                logger.warning("%s[%s] failed on instance %d rep %d: %s", spec.id, label, instance, rep, exc)
                cell.runtime_s = None
                cell.error = f"{type(exc).__name__}: {exc}"
            else:
                cell.coverage_ratio = result.coverage_ratio
                cell.violation_additive = result.violation_additive
                cell.violation_multiplicative = result.violation_multiplicative
                cell.min_group_coverage = result.min_group_coverage
                cell.group_coverages = tuple(float(value) for value in result.group_coverages)
                if spec.id == 'grdy_im':
                    reference = result.violation_additive
            cells[(spec.id, label)] = cell

    logger.debug("Instance %d rep %d finished %d cells", instance, rep, len(cells))
    return [cells[(spec.id, label)] for spec in config.algorithms for label in spec.etas]


def run_experiment(config, workers=None):
    """
    Run every (instance, repetition, algorithm, eta) cell of a configuration

    Repetitions run on a thread pool of `workers` (FAIRSPREAD WORKERS by
    default). A failing cell is logged and kept with its error; the rest of
    the run continues.

    Returns:
        EvaluationReport: cells in (instance, rep, algorithm, eta) order
    """
    workers = settings.FAIRSPREAD['WORKERS'] if workers is None else workers
    workers = max(1, int(workers))
    instances = [build_instance(config, index) for index in range(config.instances)]
    tasks = [(index, rep) for index in range(config.instances) for rep in range(config.repetitions)]

    logger.info("Running %s: %d repetitions on %d workers", config.name, len(tasks), workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(_run_repetition, config, index, rep, *instances[index])
            for index, rep in tasks
        ]
        results = [future.result() for future in futures]

    report = EvaluationReport(
        name=config.name,
        repetitions=config.repetitions,
        instances=config.instances,
        algorithms=config.algorithms,
        cells=[cell for cells in results for cell in cells],
    )
    if report.failed_cells:
        logger.warning("%s: %d of %d cells failed", config.name, len(report.failed_cells), len(report.cells))
    return report


def confidence_interval(values, confidence=CONFIDENCE):
    """
    Mean and normal-approximation half-width of a list of observations

    Returns:
        tuple: (mean, half_width); half_width is None for fewer than two
            values and mean is None for none
    """
    data = np.asarray([value for value in values if value is not None], dtype=np.float64)
    if data.size == 0:
        return None, None
    mean = float(data.mean())
    if data.size < 2:
        return mean, None
    z = norm.ppf(0.5 + confidence / 2.0)
    return mean, float(z * data.std(ddof=0) / math.sqrt(data.size))


def report_frame(report, timings=True):
    """
    The report as a DataFrame with one row per cell plus mean and ci95 rows

    Failed cells keep their row with empty metric columns. The `rep`
    column counts repetitions across instances.
    """
    rows = []
    for cell in report.cells:
        rows.append({
            'algorithm': cell.algorithm,
            'eta': cell.eta,
            'rep': str(report.global_rep(cell)),
            'coverage_ratio': cell.coverage_ratio,
            'violation_additive': cell.violation_additive,
            'violation_multiplicative': cell.violation_multiplicative,
            'runtime_s': cell.runtime_s if timings else None,
            'seed': str(cell.seed),
        })

    for algorithm, eta in report.keys():
        cells = [cell for cell in report.cells_for(algorithm, eta) if not cell.failed]
        stats = {}
        for metric in METRICS:
            if metric == 'runtime_s' and not timings:
                stats[metric] = (None, None)
            else:
                stats[metric] = confidence_interval([getattr(cell, metric) for cell in cells])
        for label, position in (('mean', 0), ('ci95', 1)):
            row = {'algorithm': algorithm, 'eta': eta, 'rep': label, 'seed': ''}
            row.update({metric: stats[metric][position] for metric in METRICS})
            rows.append(row)

    frame = pd.DataFrame(rows, columns=list(CSV_COLUMNS))
    for metric in METRICS:
        frame[metric] = frame[metric].astype(np.float64)
    return frame


def emit_csv(report, path, timings=True):
    """Write the report CSV; identical reports give byte-identical files when `timings` is off"""
    frame = report_frame(report, timings=timings)
    frame.to_csv(path, index=False, encoding='utf-8', lineterminator='\n')
    logger.info("Wrote %d rows to %s", len(frame), path)
    return frame


def read_csv(path):
    """Read a report CSV back, floats restored exactly"""
    text_columns = ('algorithm', 'eta', 'rep', 'seed')
    return pd.read_csv(
        path,
        dtype={column: str for column in text_columns},
        keep_default_na=False,
        na_values={metric: [''] for metric in METRICS},
        float_precision='round_trip',
    )


def _optional(value):
    return None if value is None or (isinstance(value, float) and math.isnan(value)) else value


@transaction.atomic
def record_report(report, config, csv_path=''):
    """
    Store a report in the database

    Returns:
        ExperimentRun: the stored run with one RunRecord per cell
    """
    run = ExperimentRun.objects.create(
        name=report.name,
        config=config.to_dict(),
        base_seed=config.seed,
        repetitions=report.repetitions,
        instances=report.instances,
        algorithm_samples=config.algorithm_samples,
        evaluation_samples=config.evaluation_samples,
        failed_cells=len(report.failed_cells),
        csv_path=str(csv_path or ''),
    )
    RunRecord.objects.bulk_create([
        RunRecord(
            run=run,
            instance=cell.instance,
            rep=cell.rep,
            algorithm=cell.algorithm,
            eta=cell.eta,
            eta_value=_optional(cell.eta_value),
            coverage_ratio=_optional(cell.coverage_ratio),
            violation_additive=_optional(cell.violation_additive),
            violation_multiplicative=_optional(cell.violation_multiplicative),
            min_group_coverage=_optional(cell.min_group_coverage),
            group_coverages=list(cell.group_coverages) or None,
            runtime_s=_optional(cell.runtime_s),
            seed=cell.seed,
            error=cell.error,
        )
        for cell in report.cells
    ])
    logger.info("Recorded run %s with %d cells", run.pk, len(report.cells))
    return run
