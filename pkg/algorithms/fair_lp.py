# algorithms/fair_lp.py
import logging

import numpy as np
from django.core.exceptions import ValidationError
from scipy import sparse

from diffusion.types import CoverageVector
from diffusion.utils import evaluate_distribution
from lp_interface.types import LinearProgram, LpSolveError
from lp_interface.utils import solve
from solutions.types import IndependentSolution, SetDistribution

from .baselines import mult_weight_maximin, single_community_weights
from .greedy import greedy_weighted_coverage, grdy_im

logger = logging.getLogger(__name__)


def _check_eta(eta, upper=1.0):
    eta = float(eta)
    if not 0.0 <= eta <= upper:
        raise ValidationError(f"eta must lie in [0, {upper:g}], got {eta}.", code='range')
    return eta


def _add_band(lp, rows, cols, values, count, eta, name):
    """Rows r: -eta <= a_r · z <= eta (an equality when eta is 0)"""
    if eta == 0.0:
        lp.add_constraints(rows, cols, values, ['='] * count, 0.0, name=name)
    else:
        lp.add_constraints(rows, cols, values, ['<='] * count, eta, name=name + '_hi')
        lp.add_constraints(rows, cols, values, ['>='] * count, -eta, name=name + '_lo')


def reach_matrix(sample):
    """
    Sparse (|M| n, n) 0/1 matrix: row L * n + v marks the sources reaching v in L

    Rows carry sorted column indices, so equal rows have equal index runs.
    """
    n = sample.node_count
    cells = len(sample) * n
    reach = [sample.reach_from(node) for node in range(n)]
    rows = np.concatenate(reach) if reach else np.zeros(0, dtype=np.int64)
    cols = np.repeat(np.arange(n), [r.size for r in reach])
    matrix = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(cells, n))
    matrix.sort_indices()
    return matrix


def _row_labels(matrix, extra=None):
    """Label rows by their sparsity pattern (and `extra`), in order of first appearance"""
    index = {}
    labels = np.empty(matrix.shape[0], dtype=np.int64)
    for row in range(matrix.shape[0]):
        key = matrix.indices[matrix.indptr[row]:matrix.indptr[row + 1]].tobytes()
        if extra is not None:
            key = (key, extra[row])
        labels[row] = index.setdefault(key, len(index))
    return labels, len(index)


def _membership_labels(communities):
    """Nodes in exactly the same communities share a label"""
    membership = sparse.csr_matrix(communities.averaging_matrix.T)
    membership.sort_indices()
    labels, _ = _row_labels(membership)
    return labels


def surrogate_coverage(sample, x, reach=None):
    """Σ_L w_L min(1, Σ_{i reaching v in L} x_i) for every node v"""
    reach = reach_matrix(sample) if reach is None else reach
    x = np.asarray(getattr(x, 'x', x), dtype=np.float64)
    per_cell = np.minimum(reach @ x, 1.0).reshape(len(sample), sample.node_count)
    return CoverageVector(sample.weights @ per_cell)


def ind_lp_program(sample, communities, k, eta=0.0):
    """
    LP over independent marginals x

    The surrogate coverage of cell (L, v) is y = Σ_{i reaching v in L} x_i,
    capped at 1 (eta = 0) or relaxed to y in [Σ - eta, Σ] ∩ [0, 1]; every
    community's weighted mean of y equals the common value γ and the
    objective is the total weighted y.

    For eta = 0, y is substituted out: the program keeps x and γ, one
    Σ x <= 1 row per distinct reach set, and fairness rows written in x.
    For eta > 0, cells with the same reach set and the same community
    membership of v share one y whose weight is the sum of theirs.

    Returns:
        (LinearProgram, x indices, γ index)
    """
    eta = _check_eta(eta)
    n = sample.node_count
    reach = reach_matrix(sample)
    cell_weights = sample.cell_weights
    lp = LinearProgram('ind_lp')

    if eta == 0.0:
        cell_node = sparse.csr_matrix(
            (cell_weights, (np.arange(reach.shape[0]) % max(n, 1), np.arange(reach.shape[0]))),
            shape=(n, reach.shape[0]),
        )
        # node_reach[v, i]: weighted probability that i reaches v
        node_reach = sparse.csr_matrix(cell_node @ reach)
        x = lp.add_variables(n, 0.0, 1.0, objective=np.asarray(node_reach.sum(axis=0)).ravel(), name='x')
        gamma = lp.add_variable(0.0, 1.0, name='gamma')
        lp.add_constraint(x, 1.0, '<=', float(k), name='budget')

        labels, _ = _row_labels(reach)
        _, first = np.unique(labels, return_index=True)
        first = first[np.diff(reach.indptr)[first] > 1]
        cap = reach[first].tocoo()
        lp.add_constraints(cap.row, x[cap.col], cap.data, ['<='] * first.size, 1.0, name='reach')

        fair = sparse.coo_matrix(communities.averaging_matrix @ node_reach)
        rows = np.concatenate([fair.row, np.arange(communities.m)])
        cols = np.concatenate([x[fair.col], np.full(communities.m, gamma)])
        values = np.concatenate([fair.data, -np.ones(communities.m)])
    else:
        labels, count = _row_labels(reach, _membership_labels(communities)[np.arange(reach.shape[0]) % n])
        _, first = np.unique(labels, return_index=True)
        merged = np.bincount(labels, weights=cell_weights, minlength=count)

        x = lp.add_variables(n, 0.0, 1.0, name='x')
        y = lp.add_variables(count, 0.0, 1.0, objective=merged, name='y')
        gamma = lp.add_variable(0.0, 1.0, name='gamma')
        lp.add_constraint(x, 1.0, '<=', float(k), name='budget')

        couple = reach[first].tocoo()
        rows = np.concatenate([couple.row, np.arange(count)])
        cols = np.concatenate([x[couple.col], y])
        values = np.concatenate([couple.data, -np.ones(count)])
        lp.add_constraints(rows, cols, values, ['>='] * count, 0.0, name='couple_upper')
        lp.add_constraints(rows, cols, values, ['<='] * count, eta, name='couple_lower')

        fair = sparse.coo_matrix(communities.averaging_matrix[:, first % n] @ sparse.diags(merged))
        rows = np.concatenate([fair.row, np.arange(communities.m)])
        cols = np.concatenate([y[fair.col], np.full(communities.m, gamma)])
        values = np.concatenate([fair.data, -np.ones(communities.m)])

    lp.add_constraints(rows, cols, values, ['='] * communities.m, 0.0, name='fair')
    logger.debug("ind_lp: %d variables, %d rows", lp.variable_count, lp.constraint_count)
    return lp, x, gamma


def ind_lp(sample, communities, k, eta=0.0):
    """
    Fair independent seeding via the LP surrogate of the coverage probabilities

    Returns:
        IndependentSolution: the x part of an optimal LP solution

    Raises:
        LpSolveError: when HiGHS does not report an optimal, verified point
    """
    eta = _check_eta(eta)
    if eta >= 1.0:
        raise ValidationError("ind_lp needs eta < 1.", code='range')
    lp, x, _ = ind_lp_program(sample, communities, k, eta)
    result = solve(lp)
    if not result.ok:
        raise LpSolveError(result, 'ind_lp')
    return IndependentSolution(np.clip(result.x[x], 0.0, 1.0), k)


def mixture_program(sample, communities, k, eta, components, name='mixture_lp'):
    """
    LP over convex combinations of fixed seeding strategies

    Each component is a point mass or a distribution given as (node set,
    weight) pairs. Constraints: weights sum to 1, expected size <= k, every
    group coverage within eta of γ. Objective: total expected coverage.

    Returns:
        (LinearProgram, weight indices, γ index)
    """
    eta = _check_eta(eta)
    coverages = np.array([evaluate_distribution(sample, component).values for component in components])
    groups = np.asarray(communities.averaging_matrix @ coverages.T)
    sizes = np.array([sum(weight * len(nodes) for nodes, weight in component) for component in components])
    count = len(components)

    lp = LinearProgram(name)
    weights = lp.add_variables(count, 0.0, 1.0, objective=coverages.sum(axis=1), name='p')
    gamma = lp.add_variable(0.0, 1.0, name='gamma')
    lp.add_constraint(weights, 1.0, '=', 1.0, name='mass')
    lp.add_constraint(weights, sizes, '<=', float(k), name='budget')

    m = communities.m
    rows = np.repeat(np.arange(m), count + 1)
    cols = np.tile(np.append(weights, gamma), m)
    values = np.column_stack([groups, -np.ones(m)]).ravel()
    _add_band(lp, rows, cols, values, m, eta, 'fair')
    return lp, weights, gamma


def _solve_mixture(sample, communities, k, eta, components, name):
    lp, weights, _ = mixture_program(sample, communities, k, eta, components, name)
    result = solve(lp)
    if not result.ok:
        raise LpSolveError(result, name)
    return np.clip(result.x[weights], 0.0, 1.0), result


def _flatten(components, mix, k):
    support = [
        (nodes, share * weight)
        for component, share in zip(components, mix)
        for nodes, weight in component
    ]
    total = mix.sum()
    return SetDistribution.from_weights(
        [nodes for nodes, _ in support], [weight / total for _, weight in support], k
    )


def _with_empty_set(support):
    seen, sets = set(), []
    for nodes in [()] + [tuple(sorted(int(v) for v in s)) for s in support]:
        if nodes not in seen:
            seen.add(nodes)
            sets.append(nodes)
    return sets


def restricted_support_lp(sample, communities, k, eta, support):
    """
    Best fair distribution whose support is limited to `support` plus ∅

    Returns:
        (SetDistribution, LpSolution)
    """
    sets = _with_empty_set(support)
    components = [[(nodes, 1.0)] for nodes in sets]
    mix, result = _solve_mixture(sample, communities, k, eta, components, 'restricted_support_lp')
    return _flatten(components, mix, k), result


def per_community_sets(sample, communities, k):
    """S_1: for each community, greedy k seeds for that community's coverage"""
    return [
        greedy_weighted_coverage(sample, k, single_community_weights(communities, index)).seeds
        for index in range(communities.m)
    ]


def grdy_grp_support(sample, communities, k):
    """S_1 together with the greedy prefixes T_0..T_2k"""
    trace = grdy_im(sample, k, horizon=2 * k)
    return per_community_sets(sample, communities, k) + trace.prefixes(2 * k)


def grdy_grp_lp(sample, communities, k, eta=0.0):
    """Fair distribution over per-community greedy sets and greedy prefixes"""
    distribution, result = restricted_support_lp(
        sample, communities, k, eta, grdy_grp_support(sample, communities, k)
    )
    logger.debug("grdy_grp+lp eta=%g: objective %.6f, support %d", eta, result.objective, len(distribution))
    return distribution


def maxmin_lp(sample, communities, k, eta=0.0, iterations=None, step=None):
    """
    Fair mixture of ∅, the per-community greedy sets and the maximin distribution q

    Returns:
        SetDistribution with q's support expanded and scaled by its mixture weight
    """
    q = mult_weight_maximin(sample, communities, k, iterations, step)
    components = [[((), 1.0)]]
    components += [[(nodes, 1.0)] for nodes in per_community_sets(sample, communities, k)]
    components.append(q.scaled(1.0))
    mix, result = _solve_mixture(sample, communities, k, eta, components, 'maxmin_lp')
    logger.debug("maxmin+lp eta=%g: objective %.6f, weight on q %.4f", eta, result.objective, mix[-1])
    return _flatten(components, mix, k)
