# algorithms/greedy.py
import heapq
import logging
from itertools import combinations

import numpy as np
from django.core.exceptions import ValidationError

from .types import GreedyTrace

logger = logging.getLogger(__name__)

# gains are compared after rounding so float noise never overrides the id tie-break
GAIN_DIGITS = 12


def _node_weights(sample, node_weights):
    n = sample.node_count
    if node_weights is None:
        return np.ones(n)
    weights = np.asarray(node_weights, dtype=np.float64).reshape(-1)
    if weights.shape != (n,):
        raise ValidationError("node_weights needs one entry per node.", code='argument')
    if weights.size and weights.min() < 0.0:
        raise ValidationError("node_weights must be non-negative.", code='range')
    return weights


def _cell_weights(sample, weights):
    return np.outer(sample.weights, weights).ravel()


def greedy_weighted_coverage(sample, k, node_weights=None, initial=()):
    """
    Lazy greedy (CELF) maximization of Σ_v weight_v σ̃_v(S) with |S| <= k

    Ties go to the lowest node id. The run stops early once no candidate
    has a positive marginal gain.

    Args:
        sample (LiveEdgeSample): algorithm-side sample
        k (int): number of picks
        node_weights: non-negative weight per node (default all ones)
        initial: seeds fixed before the run; gains are relative to them

    Returns:
        GreedyTrace
    """
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}.", code='argument')
    weights = _node_weights(sample, node_weights)
    cell_weights = _cell_weights(sample, weights)
    covered = np.zeros(cell_weights.size, dtype=bool)
    initial = tuple(sorted({int(v) for v in initial}))
    for node in initial:
        covered[sample.reach_from(node)] = True
    value = float(cell_weights[covered].sum())

    def gain(node):
        reach = sample.reach_from(node)
        return round(float(cell_weights[reach[~covered[reach]]].sum()), GAIN_DIGITS)

    seeds, gains, values = [], [], [value]
    if k == 0:
        return GreedyTrace((), (), tuple(values), initial)

    taken = set(initial)
    heap = [(-gain(node), node, 0) for node in range(sample.node_count) if node not in taken]
    heapq.heapify(heap)

    while heap and len(seeds) < k:
        negative_gain, node, stamp = heapq.heappop(heap)
        if stamp != len(seeds):
            heapq.heappush(heap, (-gain(node), node, len(seeds)))
            continue
        if negative_gain >= 0.0:
            break
        seeds.append(node)
        gains.append(-negative_gain)
        covered[sample.reach_from(node)] = True
        value = float(cell_weights[covered].sum())
        values.append(value)

    logger.debug("Greedy picked %d of %d seeds, value %.6f", len(seeds), k, value)
    return GreedyTrace(tuple(seeds), tuple(gains), tuple(values), initial)


def grdy_im(sample, k, horizon=None):
    """
    Plain greedy for influence maximization

    `horizon` extends the run beyond k (grdy_grp+lp asks for T_0..T_2k);
    T_i is `trace.prefix(i)`.
    """
    horizon = k if horizon is None else max(k, horizon)
    return greedy_weighted_coverage(sample, horizon)


def brute_force_max_coverage(sample, k, node_weights=None):
    """
    Exhaustive maximizer of Σ_v weight_v σ̃_v(S) over |S| <= k

    Returns:
        (tuple of seeds, value); among equal values the lexicographically
        smallest set of the smallest size wins
    """
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}.", code='argument')
    cell_weights = _cell_weights(sample, _node_weights(sample, node_weights))
    best, best_value = (), 0.0
    for size in range(1, min(k, sample.node_count) + 1):
        for seeds in combinations(range(sample.node_count), size):
            value = round(float(cell_weights[sample.reach_of(seeds)].sum()), GAIN_DIGITS)
            if value > best_value:
                best, best_value = seeds, value
    return best, best_value
