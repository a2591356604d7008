# lp_interface/utils.py
import logging

import numpy as np
from django.conf import settings
from scipy import sparse
from scipy.optimize import linprog

from .types import LinearProgram, LpSolution, LpStatus

logger = logging.getLogger(__name__)

# scipy.optimize.linprog status codes
_STATUS = {
    0: LpStatus.OPTIMAL,
    1: LpStatus.NUMERICAL,
    2: LpStatus.INFEASIBLE,
    3: LpStatus.UNBOUNDED,
    4: LpStatus.NUMERICAL,
}


def constraint_violation(lp, x):
    """Largest amount by which `x` violates a row or a bound of `lp`"""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return 0.0
    activity = lp.matrix() @ x
    rhs = lp.rhs
    senses = lp.senses
    worst = 0.0
    if rhs.size:
        excess = np.zeros(rhs.size)
        upper_rows = senses == '<='
        lower_rows = senses == '>='
        equal_rows = senses == '='
        excess[upper_rows] = activity[upper_rows] - rhs[upper_rows]
        excess[lower_rows] = rhs[lower_rows] - activity[lower_rows]
        excess[equal_rows] = np.abs(activity[equal_rows] - rhs[equal_rows])
        worst = max(worst, float(excess.max()))
    with np.errstate(invalid='ignore'):
        below = np.nan_to_num(lp.lower - x, nan=0.0, neginf=0.0)
        above = np.nan_to_num(x - lp.upper, nan=0.0, neginf=0.0)
    return max(worst, float(below.max()), float(above.max()))


def solve(lp: LinearProgram, tolerance=None):
    """
    Solve a maximization LP with HiGHS

    Optimal points are substituted back into every row; a violation above
    `tolerance` (default FAIRSPREAD['LP_TOLERANCE']) turns the status into
    'numerical'.

    Returns:
        LpSolution
    """
    if tolerance is None:
        tolerance = settings.FAIRSPREAD['LP_TOLERANCE']
    lp.validate()

    matrix = lp.matrix()
    senses = lp.senses
    rhs = lp.rhs
    upper_rows = np.flatnonzero(senses == '<=')
    lower_rows = np.flatnonzero(senses == '>=')
    equal_rows = np.flatnonzero(senses == '=')

    a_ub = b_ub = a_eq = b_eq = None
    if upper_rows.size or lower_rows.size:
        a_ub = sparse.vstack([matrix[upper_rows], -matrix[lower_rows]], format='csr')
        b_ub = np.concatenate([rhs[upper_rows], -rhs[lower_rows]])
    if equal_rows.size:
        a_eq = matrix[equal_rows]
        b_eq = rhs[equal_rows]

    logger.debug(
        "Solving %s: %d variables, %d rows, %d nonzeros",
        lp.name, lp.variable_count, lp.constraint_count, matrix.nnz,
    )
    result = linprog(
        -lp.objective,
        A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
        bounds=np.column_stack([lp.lower, lp.upper]),
        method='highs',
    )
    status = _STATUS.get(result.status, LpStatus.NUMERICAL)
    if status != LpStatus.OPTIMAL:
        logger.warning("LP %s finished with status %s: %s", lp.name, status, result.message)
        return LpSolution(status=status, message=str(result.message))

    x = np.clip(result.x, lp.lower, lp.upper)
    violation = constraint_violation(lp, x)
    if violation > tolerance:
        message = f"solution violates a constraint by {violation:.3g}"
        logger.warning("LP %s: %s", lp.name, message)
        return LpSolution(status=LpStatus.NUMERICAL, x=x, objective=float(lp.objective @ x), message=message)

    return LpSolution(status=LpStatus.OPTIMAL, x=x, objective=float(lp.objective @ x), message=str(result.message))
