# lp_interface/types.py
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError
from scipy import sparse

SENSES = ('<=', '>=', '=')


class LpStatus:
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'
    NUMERICAL = 'numerical'


class LinearProgram:
    """
    Maximization LP with bounded variables and sparse constraint rows

    Build it incrementally: `add_variables` returns the new column indices,
    `add_constraint` adds one row, `add_constraints` adds a block of rows
    from (row, col, value) triplets.
    """

    def __init__(self, name='lp'):
        self.name = name
        self._lower = []
        self._upper = []
        self._objective = []
        self._var_names = []
        self._rows = []
        self._cols = []
        self._vals = []
        self._senses = []
        self._rhs = []
        self._row_names = []

    def __repr__(self):
        return f"LinearProgram({self.name!r}, vars={self.variable_count}, rows={self.constraint_count})"

    @property
    def variable_count(self):
        return len(self._lower)

    @property
    def constraint_count(self):
        return len(self._senses)

    def add_variables(self, count, lower=0.0, upper=np.inf, objective=0.0, name='x'):
        start = self.variable_count
        self._lower.extend(np.broadcast_to(np.asarray(lower, dtype=np.float64), (count,)).tolist())
        self._upper.extend(np.broadcast_to(np.asarray(upper, dtype=np.float64), (count,)).tolist())
        self._objective.extend(np.broadcast_to(np.asarray(objective, dtype=np.float64), (count,)).tolist())
        self._var_names.extend(f"{name}{index}" for index in range(count))
        return np.arange(start, start + count)

    def add_variable(self, lower=0.0, upper=np.inf, objective=0.0, name='x'):
        index = int(self.add_variables(1, lower, upper, objective, name)[0])
        self._var_names[index] = name
        return index

    def add_constraint(self, indices, coefficients, sense, rhs, name=None):
        row = self.constraint_count
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        coefficients = np.broadcast_to(np.asarray(coefficients, dtype=np.float64), indices.shape)
        self.add_constraints(np.zeros(indices.size, dtype=np.int64), indices, coefficients, [sense], [rhs])
        if name is not None:
            self._row_names[row] = name
        return row

    def add_constraints(self, rows, cols, values, senses, rhs, name='c'):
        """
        Append a block of rows

        Args:
            rows: local row index (0..len(senses)-1) of every nonzero
            cols: variable index of every nonzero
            values: coefficient of every nonzero
            senses: one of '<=', '>=', '=' per row
            rhs: right-hand side per row

        Returns:
            np.ndarray: global indices of the new rows
        """
        start = self.constraint_count
        senses = list(senses)
        rhs = np.broadcast_to(np.asarray(rhs, dtype=np.float64), (len(senses),))
        unknown = set(senses) - set(SENSES)
        if unknown:
            raise ValidationError(f"Unknown constraint sense(s): {sorted(unknown)}.", code='argument')
        self._rows.append(np.asarray(rows, dtype=np.int64).reshape(-1) + start)
        self._cols.append(np.asarray(cols, dtype=np.int64).reshape(-1))
        self._vals.append(np.asarray(values, dtype=np.float64).reshape(-1))
        self._senses.extend(senses)
        self._rhs.extend(rhs.tolist())
        self._row_names.extend(f"{name}{start + index}" for index in range(len(senses)))
        return np.arange(start, start + len(senses))

    @property
    def lower(self):
        return np.asarray(self._lower, dtype=np.float64)

    @property
    def upper(self):
        return np.asarray(self._upper, dtype=np.float64)

    @property
    def objective(self):
        return np.asarray(self._objective, dtype=np.float64)

    @property
    def senses(self):
        return np.asarray(self._senses, dtype=object)

    @property
    def rhs(self):
        return np.asarray(self._rhs, dtype=np.float64)

    def matrix(self):
        """Constraint matrix as CSR (duplicate entries summed)"""
        if self._rows:
            rows = np.concatenate(self._rows)
            cols = np.concatenate(self._cols)
            vals = np.concatenate(self._vals)
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            vals = np.zeros(0)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(self.constraint_count, self.variable_count))

    def validate(self):
        """
        Check variable references and bounds

        Raises:
            ValidationError: `argument` on invalid indices or lower > upper
        """
        for cols in self._cols:
            if cols.size and (cols.min() < 0 or cols.max() >= self.variable_count):
                raise ValidationError("Constraint references an unknown variable.", code='argument')
        if (self.lower > self.upper).any():
            raise ValidationError("Variable lower bound exceeds its upper bound.", code='argument')

    def to_lp_text(self):
        """CPLEX-LP rendering for debugging"""

        def terms(indices, coefficients):
            parts = [f"{'-' if c < 0 else '+'} {abs(c):.12g} {self._var_names[i]}"
                     for i, c in zip(indices, coefficients) if c != 0.0]
            return ' '.join(parts) if parts else '0'

        objective = self.objective
        nonzero = np.flatnonzero(objective)
        lines = ['\\ ' + self.name, 'Maximize', f" obj: {terms(nonzero, objective[nonzero])}", 'Subject To']
        matrix = self.matrix()
        for row in range(self.constraint_count):
            start, stop = matrix.indptr[row], matrix.indptr[row + 1]
            lines.append(
                f" {self._row_names[row]}: {terms(matrix.indices[start:stop], matrix.data[start:stop])}"
                f" {self._senses[row]} {self._rhs[row]:.12g}"
            )
        lines.append('Bounds')
        for index in range(self.variable_count):
            low, high = self._lower[index], self._upper[index]
            low_text = '-inf' if np.isneginf(low) else f"{low:.12g}"
            high_text = '+inf' if np.isposinf(high) else f"{high:.12g}"
            lines.append(f" {low_text} <= {self._var_names[index]} <= {high_text}")
        lines.append('End')
        return '\n'.join(lines) + '\n'


@dataclass
class LpSolution:
    status: str
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = float('nan')
    message: str = ''

    @property
    def ok(self):
        return self.status == LpStatus.OPTIMAL


class LpSolveError(RuntimeError):
    """Raised by callers that need an optimal LP and did not get one"""

    def __init__(self, solution, context=''):
        self.solution = solution
        super().__init__(f"{context or 'LP'} finished with status {solution.status!r}: {solution.message}")
