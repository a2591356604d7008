# algorithms/baselines.py
import logging
import math

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError

from diffusion.utils import coverage_vector, group_coverage
from solutions.types import IndependentSolution, SeedSet, SetDistribution

from .greedy import GAIN_DIGITS, greedy_weighted_coverage

logger = logging.getLogger(__name__)


def _check_budget(k, n):
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}.", code='argument')
    return min(int(k), n)


def community_node_weights(communities, community_weights=None):
    """Σ_{C ∋ v} w_C / |C| for every node (w_C = 1 by default)"""
    if community_weights is None:
        community_weights = np.ones(communities.m)
    return np.asarray(communities.averaging_matrix.T @ np.asarray(community_weights, dtype=np.float64))


def single_community_weights(communities, index):
    """Weights 1/|C| on the members of one community, 0 elsewhere"""
    weights = np.zeros(communities.m)
    weights[index] = 1.0
    return community_node_weights(communities, weights)


def grdy_maxmin(sample, communities, k):
    """
    Greedily add the node that maximizes the minimum group coverage

    Ties go to the larger total coverage, then to the lowest id.

    Returns:
        SeedSet
    """
    n = sample.node_count
    budget = _check_budget(k, n)
    averaging = communities.averaging_matrix
    coverage = np.zeros(n)
    covered = np.zeros(len(sample) * n, dtype=bool)
    seeds = []

    for _ in range(budget):
        best_key, best_node, best_coverage = None, None, None
        for node in range(n):
            if node in seeds:
                continue
            reach = sample.reach_from(node)
            fresh = reach[~covered[reach]]
            candidate = coverage + np.bincount(fresh % n, weights=sample.weights[fresh // n], minlength=n)
            groups = averaging @ candidate
            key = (round(float(groups.min()), GAIN_DIGITS), round(float(candidate.sum()), GAIN_DIGITS))
            if best_key is None or key > best_key:
                best_key, best_node, best_coverage = key, node, candidate
        seeds.append(best_node)
        covered[sample.reach_from(best_node)] = True
        coverage = best_coverage

    return SeedSet(seeds, k)


def grdy_prop(sample, communities, k):
    """
    Proportional greedy: ⌊k|C|/n⌋ seeds optimized for each community in order,
    then the remainder filled by plain greedy on the total coverage
    """
    n = sample.node_count
    budget = _check_budget(k, n)
    seeds = ()
    for index, size in enumerate(communities.sizes):
        share = min((budget * int(size)) // n, budget - len(seeds))
        if share <= 0:
            continue
        trace = greedy_weighted_coverage(sample, share, single_community_weights(communities, index), initial=seeds)
        seeds = trace.initial + trace.seeds
    if len(seeds) < budget:
        trace = greedy_weighted_coverage(sample, budget - len(seeds), initial=seeds)
        seeds = trace.initial + trace.seeds
    return SeedSet(seeds, k)


def myopic(graph, sample, k):
    """
    First the node of largest out-degree, then repeatedly the non-seed with
    the smallest probability of being reached (lowest id on ties)
    """
    n = graph.node_count
    budget = _check_budget(k, n)
    if budget == 0:
        return SeedSet((), k)
    seeds = [int(np.argmax(graph.out_degree))]
    while len(seeds) < budget:
        values = coverage_vector(sample, seeds).values.copy()
        values[seeds] = np.inf
        seeds.append(int(np.argmin(values)))
    return SeedSet(seeds, k)


def uniform_solution(n, k):
    """x_v = k/n for every node"""
    if not 0 <= k <= n:
        raise ValidationError(f"uniform needs 0 <= k <= n, got k={k}, n={n}.", code='argument')
    return IndependentSolution(np.full(n, k / n if n else 0.0), k)


def default_mult_weight_iterations(m):
    return math.ceil(8.0 * math.log(max(m, 2)) / 0.25)


def mult_weight_maximin(sample, communities, k, iterations=None, step=None):
    """
    Multiplicative weights over communities for the maximin criterion

    Each round picks S_t by greedy on node weights Σ_{C ∋ v} w_C/|C| and
    shrinks w_C by (1 - step)^{σ̃_C(S_t)}. The output is the uniform
    distribution over S_1..S_T with repeated sets merged.

    Args:
        iterations: rounds T (default ⌈8 ln max(m, 2) / 0.25⌉)
        step: update step in (0, 1) (default FAIRSPREAD['MULT_WEIGHT_STEP'])

    Returns:
        SetDistribution
    """
    iterations = default_mult_weight_iterations(communities.m) if iterations is None else int(iterations)
    step = settings.FAIRSPREAD['MULT_WEIGHT_STEP'] if step is None else float(step)
    if iterations < 1:
        raise ValidationError("mult_weight needs at least one iteration.", code='argument')
    if not 0.0 < step < 1.0:
        raise ValidationError(f"mult_weight step must lie in (0, 1), got {step}.", code='range')
    budget = _check_budget(k, sample.node_count)

    community_weights = np.full(communities.m, 1.0 / communities.m)
    chosen = []
    for _ in range(iterations):
        trace = greedy_weighted_coverage(sample, budget, community_node_weights(communities, community_weights))
        seeds = trace.seeds
        chosen.append(seeds)
        groups = group_coverage(coverage_vector(sample, seeds), communities)
        community_weights = community_weights * (1.0 - step) ** groups
        community_weights /= community_weights.sum()

    logger.debug("mult_weight: %d rounds, %d distinct sets", iterations, len(set(chosen)))
    return SetDistribution([(seeds, 1.0 / iterations) for seeds in chosen], k)
