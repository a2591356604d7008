# harness/types.py
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

CSV_COLUMNS = (
    'algorithm', 'eta', 'rep', 'coverage_ratio',
    'violation_additive', 'violation_multiplicative', 'runtime_s', 'seed',
)
METRICS = ('coverage_ratio', 'violation_additive', 'violation_multiplicative', 'runtime_s')


@dataclass(frozen=True)
class AlgorithmSpec:
    id: str
    etas: tuple = ('0',)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration (see ExperimentConfigSerializer)"""

    name: str
    instance: dict
    communities: dict
    algorithms: tuple
    k: int = None
    model: str = 'IC'
    w_max: float = 0.4
    algorithm_samples: int = 1000
    evaluation_samples: int = 100
    independent_draws: int = 150
    repetitions: int = 1
    instances: int = 1
    seed: int = 0
    exact: bool = False
    mult_weight_iterations: int = None
    mult_weight_step: float = None

    def to_dict(self):
        data = asdict(self)
        data['algorithms'] = [{'id': spec.id, 'etas': list(spec.etas)} for spec in self.algorithms]
        return data

    @property
    def relative_presets(self):
        return any(eta.startswith('x') for spec in self.algorithms for eta in spec.etas)


@dataclass(frozen=True)
class SolutionEvaluation:
    coverage: np.ndarray
    group_coverages: np.ndarray
    coverage_ratio: float
    violation_additive: float
    violation_multiplicative: float
    min_group_coverage: float


@dataclass
class ReportCell:
    """One (instance, repetition, algorithm, eta) result; metrics stay None on failure"""

    algorithm: str
    eta: str
    instance: int
    rep: int
    seed: int
    eta_value: float = None
    coverage_ratio: float = None
    violation_additive: float = None
    violation_multiplicative: float = None
    min_group_coverage: float = None
    group_coverages: tuple = ()
    runtime_s: float = None
    error: str = ''

    @property
    def failed(self):
        return bool(self.error)


@dataclass
class EvaluationReport:
    """
    All cells of one experiment

    `cells` is kept in the deterministic order (instance, rep, algorithm
    position, eta position) regardless of the order repetitions finished in.
    """

    name: str
    repetitions: int
    instances: int
    algorithms: tuple = ()
    cells: list = field(default_factory=list)

    def keys(self):
        """(algorithm, eta label) pairs in configuration order"""
        return [(spec.id, eta) for spec in self.algorithms for eta in spec.etas]

    def cells_for(self, algorithm, eta):
        return [cell for cell in self.cells if cell.algorithm == algorithm and cell.eta == eta]

    def global_rep(self, cell):
        return cell.instance * self.repetitions + cell.rep

    @property
    def failed_cells(self):
        return [cell for cell in self.cells if cell.failed]
