# algorithms/registry.py
from dataclasses import dataclass

from django.core.exceptions import ValidationError

from .baselines import grdy_maxmin, grdy_prop, mult_weight_maximin, myopic, uniform_solution
from .fair_lp import grdy_grp_lp, ind_lp, maxmin_lp
from .greedy import grdy_im


@dataclass
class AlgorithmContext:
    """Everything an algorithm may read for one instance and repetition"""

    graph: object
    sample: object
    communities: object
    k: int
    mult_weight_iterations: int = None
    mult_weight_step: float = None


def _grdy_im(context, eta):
    return grdy_im(context.sample, context.k).seed_set(context.k)


def _mult_weight(context, eta):
    return mult_weight_maximin(
        context.sample, context.communities, context.k,
        context.mult_weight_iterations, context.mult_weight_step,
    )


def _maxmin_lp(context, eta):
    return maxmin_lp(
        context.sample, context.communities, context.k, eta,
        context.mult_weight_iterations, context.mult_weight_step,
    )


REGISTRY = {
    'grdy_im': _grdy_im,
    'grdy_maxmin': lambda context, eta: grdy_maxmin(context.sample, context.communities, context.k),
    'grdy_prop': lambda context, eta: grdy_prop(context.sample, context.communities, context.k),
    'myopic': lambda context, eta: myopic(context.graph, context.sample, context.k),
    'uniform': lambda context, eta: uniform_solution(context.graph.node_count, context.k),
    'mult_weight': _mult_weight,
    'ind_lp': lambda context, eta: ind_lp(context.sample, context.communities, context.k, eta),
    'grdy_grp+lp': lambda context, eta: grdy_grp_lp(context.sample, context.communities, context.k, eta),
    'maxmin+lp': _maxmin_lp,
}

ALGORITHMS = tuple(REGISTRY)
RELAXED_ALGORITHMS = ('ind_lp', 'grdy_grp+lp', 'maxmin+lp')


def run_algorithm(algorithm_id, context, eta=None):
    """
    Run one algorithm by its id

    Args:
        algorithm_id: one of ALGORITHMS
        context (AlgorithmContext): instance, sample and parameters
        eta (float): slack for the LP-based algorithms (0 when omitted), ignored by the rest

    Returns:
        SeedSet, IndependentSolution or SetDistribution
    """
    try:
        algorithm = REGISTRY[algorithm_id]
    except KeyError:
        raise ValidationError(f"Unknown algorithm {algorithm_id!r}.", code='argument')
    if algorithm_id in RELAXED_ALGORITHMS:
        eta = 0.0 if eta is None else eta
    return algorithm(context, eta)
