# fixtures/utils.py
import logging
from dataclasses import replace

import numpy as np
from django.core.exceptions import ValidationError

from diffusion.utils import (
    coverage_vector,
    enumerate_live_edge_graphs,
    evaluate_distribution,
    independent_coverage_exact,
)
from graph_core.types import CommunityStructure, Graph
from solutions.types import IndependentSolution, SeedSet, SetDistribution
from solutions.utils import dp_violation_additive, dp_violation_multiplicative

from .types import FactCheck, TheoryInstance

logger = logging.getLogger(__name__)

FACT_TOLERANCE = 1e-9


def _singletons(graph):
    return CommunityStructure([[v] for v in range(graph.node_count)], graph.node_count, names=graph.labels)


def _check(label, expected, observed, passed=None):
    if passed is None:
        passed = abs(float(expected) - float(observed)) <= FACT_TOLERANCE
    return FactCheck(label, float(expected), float(observed), bool(passed))


def _exact_sample(instance):
    """Enumerated outcome space, or None when the instance is too large to verify"""
    try:
        return enumerate_live_edge_graphs(instance.graph)
    except ValidationError as exc:
        if exc.code != 'size':
            raise
        logger.warning("Skipping self-verification of %r: %s", instance, exc.message)
        return None


def _finish(instance, checks):
    """
    Attach the checks and mark the instance verified

    Raises:
        ValidationError: `fact` when any analytic fact disagrees with enumeration
    """
    failed = [check for check in checks if not check.passed]
    if failed:
        details = '; '.join(f"{c.label}: expected {c.expected:.12g}, got {c.observed:.12g}" for c in failed)
        raise ValidationError(f"Fixture {instance.name!r} failed self-verification: {details}", code='fact')
    logger.debug("Verified %d facts of %s", len(checks), instance.name)
    return replace(instance, checks=tuple(checks), verified=True)


def star_instance(N=10, eps=0.1):
    """
    Hub v with edges to u_1..u_N of weight (1+eps)/N, singleton communities, k = 1

    The maximin optimum (point mass on {v}) is far from fair while a fair
    distribution over {v} and the {u_i} exists with spread (N+1)/(N-eps).
    """
    if N < 2 or eps < 0.0 or (1.0 + eps) / N > 1.0:
        raise ValidationError(f"star needs N >= 2, eps >= 0 and (1+eps)/N <= 1 (N={N}, eps={eps}).", code='argument')
    weight = (1.0 + eps) / N
    labels = ['v'] + [f"u{i}" for i in range(1, N + 1)]
    graph = Graph(N + 1, [0] * N, list(range(1, N + 1)), [weight] * N, labels)
    fair_hub = 1.0 / (N - eps)
    fair_leaf = (1.0 - fair_hub) / N
    instance = TheoryInstance(
        name='star',
        graph=graph,
        communities=_singletons(graph),
        k=1,
        facts={
            'hub_spread': 2.0 + eps,
            'hub_multiplicative_violation': N / (1.0 + eps),
            'fair_group_coverage': fair_hub,
            'fair_spread': (N + 1) / (N - eps),
        },
        solutions={
            'maximin_distribution': SetDistribution.point_mass((0,), 1),
            'fair_distribution': SetDistribution([((0,), fair_hub)] + [((i,), fair_leaf) for i in range(1, N + 1)], 1),
        },
        params={'N': N, 'eps': eps},
    )

    sample = _exact_sample(instance)
    if sample is None:
        return instance
    hub = coverage_vector(sample, [0])
    fair = evaluate_distribution(sample, instance.solutions['fair_distribution'])
    facts = instance.facts
    return _finish(instance, [
        _check('hub_spread', facts['hub_spread'], hub.total),
        _check('hub_multiplicative_violation', facts['hub_multiplicative_violation'],
               1.0 / dp_violation_multiplicative(hub.values)),
        _check('fair_group_coverage', facts['fair_group_coverage'], fair.values.min()),
        _check('fair_additive_violation', 0.0, dp_violation_additive(fair.values)),
        _check('fair_spread', facts['fair_spread'], fair.total),
    ])


def two_node_instance():
    """
    a -> b with weight 3/4, singleton communities, k = 1

    No non-empty seed set is fair, but x = (2/3, 1/3) is.
    """
    graph = Graph(2, [0], [1], [0.75], ['a', 'b'])
    instance = TheoryInstance(
        name='two_node',
        graph=graph,
        communities=_singletons(graph),
        k=1,
        facts={
            'fair_deterministic_spread': 0.0,
            'fair_independent_coverage': 2.0 / 3.0,
            'fair_independent_spread': 4.0 / 3.0,
        },
        solutions={
            'fair_independent': IndependentSolution([2.0 / 3.0, 1.0 / 3.0], 1),
            'empty': SeedSet((), 1),
        },
    )

    sample = _exact_sample(instance)
    facts = instance.facts
    checks = []
    for node in range(graph.node_count):
        coverage = coverage_vector(sample, [node])
        checks.append(_check(
            f"seed_{graph.labels[node]}_unfair", 0.0, dp_violation_additive(coverage.values),
            passed=dp_violation_additive(coverage.values) > FACT_TOLERANCE,
        ))
    empty = coverage_vector(sample, [])
    checks.append(_check('fair_deterministic_spread', facts['fair_deterministic_spread'], empty.total))
    fair = independent_coverage_exact(sample, instance.solutions['fair_independent'])
    checks.append(_check('fair_independent_coverage_a', facts['fair_independent_coverage'], fair[0]))
    checks.append(_check('fair_independent_coverage_b', facts['fair_independent_coverage'], fair[1]))
    checks.append(_check('fair_independent_spread', facts['fair_independent_spread'], fair.total))
    return _finish(instance, checks)


def bipartite_blowup_instance(N=6):
    """
    u_1, u_2 wired with certainty to v_1..v_N, singleton communities, k = 1

    ½ {u_1, u_2} + ½ ∅ is fair with spread N/2 + 1, while the only fair
    independent solution is x = 0.
    """
    if N < 1:
        raise ValidationError(f"bipartite_blowup needs N >= 1, got {N}.", code='argument')
    labels = ['u1', 'u2'] + [f"v{i}" for i in range(1, N + 1)]
    leaves = list(range(2, N + 2))
    graph = Graph(N + 2, [0] * N + [1] * N, leaves * 2, [1.0] * (2 * N), labels)
    instance = TheoryInstance(
        name='bipartite_blowup',
        graph=graph,
        communities=_singletons(graph),
        k=1,
        facts={
            'fair_distribution_spread': N / 2 + 1,
            'fair_independent_spread': 0.0,
        },
        solutions={
            'fair_distribution': SetDistribution([((0, 1), 0.5), ((), 0.5)], 1),
            'fair_independent': IndependentSolution(np.zeros(N + 2), 1),
        },
        params={'N': N},
    )

    sample = _exact_sample(instance)
    facts = instance.facts
    fair = evaluate_distribution(sample, instance.solutions['fair_distribution'])
    zero = independent_coverage_exact(sample, instance.solutions['fair_independent'])
    checks = [
        _check('fair_distribution_spread', facts['fair_distribution_spread'], fair.total),
        _check('fair_distribution_additive_violation', 0.0, dp_violation_additive(fair.values)),
        _check('fair_independent_spread', facts['fair_independent_spread'], zero.total),
    ]
    for rho in (0.1, 0.25, 0.5):
        x = np.zeros(N + 2)
        x[:2] = rho
        coverage = independent_coverage_exact(sample, x)
        checks.append(_check(
            f"leaf_exceeds_hub_at_{rho:g}", rho * (2.0 - rho), coverage[2],
        ))
        checks.append(_check(
            f"independent_unfair_at_{rho:g}", 0.0, coverage[2] - coverage[0], passed=coverage[2] > coverage[0],
        ))
    return _finish(instance, checks)


def pof_instance(n=20):
    """
    I = {0..n/2-1}, J = {n/2..n-1}; w = n/2 reaches all of I with certainty

    Singleton communities, k = 1. σ({w}) = n/2 + 1 while every fair
    distribution spreads at most 2, so the price of fairness grows with n.
    """
    if n < 4 or n % 2:
        raise ValidationError(f"pof needs an even n >= 4, got {n}.", code='argument')
    half = n // 2
    labels = [f"i{v}" for v in range(half)] + [f"j{v}" for v in range(half)]
    graph = Graph(n, [half] * half, list(range(half)), [1.0] * half, labels)
    share = 2.0 / n
    instance = TheoryInstance(
        name='pof',
        graph=graph,
        communities=_singletons(graph),
        k=1,
        facts={
            'optimum_lower_bound': half + 1.0,
            'fair_spread_cap': 2.0,
            'price_of_fairness_lower_bound': (half + 1.0) / 2.0,
        },
        solutions={
            'hub': SeedSet([half], 1),
            'fair_distribution': SetDistribution([((v,), share) for v in range(half, n)], 1),
        },
        params={'n': n},
    )

    sample = _exact_sample(instance)
    facts = instance.facts
    hub = coverage_vector(sample, [half])
    fair = evaluate_distribution(sample, instance.solutions['fair_distribution'])
    return _finish(instance, [
        _check('optimum_lower_bound', facts['optimum_lower_bound'], hub.total),
        _check('fair_spread_cap', facts['fair_spread_cap'], fair.total),
        _check('fair_additive_violation', 0.0, dp_violation_additive(fair.values)),
        _check('price_of_fairness_lower_bound', facts['price_of_fairness_lower_bound'], hub.total / fair.total),
    ])


FIXTURES = {
    'star': star_instance,
    'two_node': two_node_instance,
    'bipartite_blowup': bipartite_blowup_instance,
    'pof': pof_instance,
}


def build_fixture(name, **params):
    """
    Build a theory instance by name

    Raises:
        ValidationError: `argument` for unknown names or parameters, `fact`
            when self-verification fails
    """
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise ValidationError(f"Unknown fixture {name!r}; choose one of {sorted(FIXTURES)}.", code='argument')
    try:
        return builder(**params)
    except TypeError as exc:
        raise ValidationError(f"Bad parameters for fixture {name!r}: {exc}", code='argument')
