# diffusion/utils.py
import logging
import math

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from scipy.sparse import csgraph

from .types import CoverageVector, LiveEdgeGraph, LiveEdgeSample

logger = logging.getLogger(__name__)

MODELS = ('IC', 'LT')
DISTRIBUTION_TOLERANCE = 1e-9


def _check_weights(graph):
    if not graph.has_weights:
        raise ValidationError("Graph edge weights are not assigned.", code='weights')


def _check_model(graph, model):
    """Validate the model tag and, for LT, the in-weight precondition"""
    _check_weights(graph)
    if callable(model):
        return
    if model not in MODELS:
        raise ValidationError(f"Unknown diffusion model {model!r}.", code='model')
    if model == 'LT':
        totals = np.bincount(graph.targets, weights=graph.weights, minlength=graph.node_count)
        violators = np.flatnonzero(totals > 1.0 + 1e-9)
        if violators.size:
            node = int(violators[0])
            raise ValidationError(
                f"LT model needs in-weight sums <= 1; node {graph.labels[node]!r} has {totals[node]:.6f}.",
                code='model',
            )


def _draw_mask(graph, model, rng):
    if callable(model):
        return np.asarray(model(graph, rng), dtype=bool)
    if model == 'IC':
        return rng.random(graph.edge_count) < graph.weights

    # LT: node v keeps the in-edge whose slice of [0, 1) contains its draw
    order = graph.in_edge_order
    targets = graph.targets[order]
    running = np.concatenate([[0.0], np.cumsum(graph.weights[order])])
    before = running[:-1] - running[graph.in_edge_offsets[targets]]
    after = before + graph.weights[order]
    draw = rng.random(graph.node_count)[targets]
    mask = np.zeros(graph.edge_count, dtype=bool)
    mask[order] = (draw >= before) & (draw < after)
    return mask


def sample_live_edge_graph(graph, model, rng):
    """
    Draw one live-edge graph

    Args:
        graph (Graph): weighted graph
        model: 'IC', 'LT', or a callable (graph, rng) -> boolean edge mask
        rng (np.random.Generator): randomness source

    Raises:
        ValidationError: `weights` for unweighted graphs, `model` for unknown
            models or LT in-weight sums above 1
    """
    _check_model(graph, model)
    return LiveEdgeGraph(graph, _draw_mask(graph, model, rng))


def build_sample(graph, model, count, rng_seed):
    """
    Draw `count` independent live-edge graphs

    Returns:
        LiveEdgeSample: uniform-weighted, deterministic under `rng_seed`
    """
    if count < 1:
        raise ValidationError("A live-edge sample needs count >= 1.", code='argument')
    _check_model(graph, model)
    rng = np.random.default_rng(rng_seed)
    masks = np.empty((count, graph.edge_count), dtype=bool)
    for index in range(count):
        masks[index] = _draw_mask(graph, model, rng)
    sample = LiveEdgeSample(graph, masks, model=model if isinstance(model, str) else 'custom', rng_seed=rng_seed)
    logger.debug("Built %s on %s", sample, graph)
    return sample


def enumerate_live_edge_graphs(graph, cap=None):
    """
    Exact IC outcome space as a weighted LiveEdgeSample

    Edges with weight 1 are always live and weight 0 never; the remaining
    uncertain edges are enumerated, so the cap counts those.

    Raises:
        ValidationError: `size` when more than `cap` edges are uncertain
    """
    cap = settings.FAIRSPREAD['ENUMERATION_CAP'] if cap is None else cap
    _check_weights(graph)
    weights = graph.weights
    uncertain = np.flatnonzero((weights > 0.0) & (weights < 1.0))
    if uncertain.size > cap:
        raise ValidationError(
            f"Exact enumeration is capped at {cap} uncertain edges, graph has {uncertain.size}.",
            code='size',
        )

    outcomes = 1 << uncertain.size
    bits = ((np.arange(outcomes)[:, None] >> np.arange(uncertain.size)[None, :]) & 1).astype(bool)
    masks = np.zeros((outcomes, graph.edge_count), dtype=bool)
    masks[:, weights >= 1.0] = True
    masks[:, uncertain] = bits
    probabilities = np.where(bits, weights[uncertain], 1.0 - weights[uncertain]).prod(axis=1)
    return LiveEdgeSample(graph, masks, model='IC', rng_seed=None, weights=probabilities)


def _check_seeds(node_count, seeds):
    seeds = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if seeds.size and (seeds[0] < 0 or seeds[-1] >= node_count):
        raise ValidationError(f"Seed ids must lie in [0, {node_count}).", code='unknown_node')
    return seeds


def reachable_set(live_edge_graph, seeds):
    """
    ρ_L(seeds): nodes reachable from the seeds over live edges (seeds included)

    Returns:
        frozenset of node ids
    """
    seeds = _check_seeds(live_edge_graph.graph.node_count, seeds)
    if seeds.size == 0:
        return frozenset()
    distances = csgraph.dijkstra(
        live_edge_graph.adjacency, directed=True, indices=seeds, unweighted=True, min_only=True
    )
    return frozenset(np.flatnonzero(np.isfinite(distances)).tolist())


def coverage_vector(sample, seeds):
    """
    σ̃_v(seeds): weighted fraction of live-edge graphs in which v is reached

    Returns:
        CoverageVector
    """
    n = sample.node_count
    seeds = _check_seeds(n, seeds)
    cells = sample.reach_of(seeds)
    values = np.bincount(cells % n, weights=sample.weights[cells // n], minlength=n)
    values = np.minimum(values, 1.0)
    values[seeds] = 1.0
    return CoverageVector(values)


def group_coverage(coverage, communities):
    """σ̃_C: mean member coverage for every community, in community order"""
    values = np.asarray(coverage, dtype=np.float64)
    return communities.averaging_matrix @ values


def exact_spread(graph, seeds, cap=None):
    """Exact σ_v(seeds) under IC by enumerating the live-edge outcome space"""
    return coverage_vector(enumerate_live_edge_graphs(graph, cap), seeds)


def default_draw_count(delta=0.1, eps=0.1):
    """Hoeffding bound ⌈ln(2/δ) / (2ε²)⌉ on the draws needed for σ_v(x)"""
    return math.ceil(math.log(2.0 / delta) / (2.0 * eps * eps))


def _independent_vector(sample, x):
    x = np.asarray(getattr(x, 'x', x), dtype=np.float64)
    if x.shape != (sample.node_count,):
        raise ValidationError("x needs one probability per node.", code='argument')
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ValidationError("x must lie in [0, 1]^n.", code='range')
    return x


def evaluate_independent(sample, x, num_draws=None, rng_seed=None):
    """
    Estimate σ̃_v(x) by drawing seed sets with node v included independently w.p. x_v

    Args:
        sample (LiveEdgeSample): evaluation sample
        x: IndependentSolution or array in [0, 1]^n
        num_draws (int): number of sets drawn (default from settings, 150)
        rng_seed: seed for the draws

    Returns:
        CoverageVector
    """
    x = _independent_vector(sample, x)
    draws = settings.FAIRSPREAD['INDEPENDENT_DRAWS'] if num_draws is None else num_draws
    if draws < 1:
        raise ValidationError("num_draws must be >= 1.", code='argument')
    rng = np.random.default_rng(rng_seed)
    total = np.zeros(sample.node_count)
    for chosen in rng.random((draws, sample.node_count)) < x:
        total += coverage_vector(sample, np.flatnonzero(chosen)).values
    return CoverageVector(total / draws)


def independent_coverage_exact(sample, x):
    """
    Pr[v reached] under independent seeding, exact for every live-edge graph

    For each L the probability is 1 - Π (1 - x_i) over the sources i that
    reach v in L; the result averages these with the sample weights.
    """
    x = _independent_vector(sample, x)
    n = sample.node_count
    log_miss = np.zeros(len(sample) * n)
    with np.errstate(divide='ignore'):
        for node in np.flatnonzero(x > 0.0):
            log_miss[sample.reach_from(int(node))] += np.log1p(-x[node])
    reached = 1.0 - np.exp(log_miss).reshape(len(sample), n)
    return CoverageVector(sample.weights @ reached)


def _support_pairs(distribution):
    support = getattr(distribution, 'support', distribution)
    return [(tuple(int(v) for v in nodes), float(weight)) for nodes, weight in support]


def evaluate_distribution(sample, distribution):
    """
    Exact mixture Σ_S p_S · σ̃(S) over an explicit finite support

    Args:
        sample (LiveEdgeSample): evaluation sample
        distribution: SetDistribution or iterable of (node set, weight)

    Raises:
        ValidationError: `distribution` when the weights do not sum to 1
    """
    pairs = _support_pairs(distribution)
    mass = sum(weight for _, weight in pairs)
    if abs(mass - 1.0) > DISTRIBUTION_TOLERANCE:
        raise ValidationError(f"Distribution weights sum to {mass}, not 1.", code='distribution')
    values = np.zeros(sample.node_count)
    for nodes, weight in pairs:
        if weight and nodes:
            values += weight * coverage_vector(sample, nodes).values
    return CoverageVector(values)
