# solutions/utils.py
import numpy as np

from .types import IndependentSolution, SeedSet, SetDistribution


def _values(group_coverages):
    values = np.asarray(group_coverages, dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise ValueError("At least one group coverage is required.")
    return values


def dp_violation_additive(group_coverages):
    """
    Additive demographic-parity violation: max_C σ_C - min_C σ_C

    Args:
        group_coverages: one value in [0, 1] per community

    Returns:
        float in [0, 1]
    """
    values = _values(group_coverages)
    return float(values.max() - values.min())


def dp_violation_multiplicative(group_coverages):
    """
    Largest β with σ_Ci >= β σ_Cj for every pair, i.e. min / max

    An all-zero outcome is perfectly fair (β = 1); a zero minimum next to a
    positive maximum gives β = 0.
    """
    values = _values(group_coverages)
    top = values.max()
    if top <= 0.0:
        return 1.0
    return float(values.min() / top)


def eps_plus_feasible(group_coverages, eps):
    """True iff every pair of group coverages differs by at most eps"""
    return dp_violation_additive(group_coverages) <= eps


def beta_feasible(group_coverages, beta):
    return dp_violation_multiplicative(group_coverages) >= beta


def min_group_coverage(group_coverages):
    """The maximin criterion value"""
    return float(_values(group_coverages).min())


def expected_size(solution):
    """|S|, Σ x_v, or Σ p_S |S| depending on the solution kind"""
    if isinstance(solution, SeedSet):
        return float(len(solution))
    if isinstance(solution, IndependentSolution):
        return float(solution.x.sum())
    if isinstance(solution, SetDistribution):
        return solution.expected_size
    raise TypeError(f"Unsupported solution type {type(solution).__name__}.")
