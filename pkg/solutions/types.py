# solutions/types.py
from __future__ import annotations

from collections import namedtuple

import numpy as np
from django.core.exceptions import ValidationError

BUDGET_SLACK = 1e-6
MASS_TOLERANCE = 1e-9

SupportEntry = namedtuple('SupportEntry', ['nodes', 'weight'])


def _node_tuple(nodes):
    values = sorted({int(v) for v in nodes})
    if values and values[0] < 0:
        raise ValidationError("Node ids cannot be negative.", code='argument')
    return tuple(values)


class SeedSet:
    """Deterministic solution S with |S| <= k"""

    kind = 'seed_set'

    def __init__(self, nodes, k=None):
        self.nodes = _node_tuple(nodes)
        self.k = len(self.nodes) if k is None else int(k)
        if len(self.nodes) > self.k:
            raise ValidationError(f"Seed set of size {len(self.nodes)} exceeds budget {self.k}.", code='budget')

    def __repr__(self):
        return f"SeedSet({list(self.nodes)}, k={self.k})"

    def __eq__(self, other):
        if not isinstance(other, SeedSet):
            return NotImplemented
        return self.nodes == other.nodes and self.k == other.k

    def __hash__(self):
        return hash((self.nodes, self.k))

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


class IndependentSolution:
    """Marginals x in [0, 1]^n with 1ᵀx <= k; node v is seeded independently w.p. x_v"""

    kind = 'independent'

    def __init__(self, x, k):
        x = np.array(x, dtype=np.float64).reshape(-1)
        if x.size and (x.min() < 0.0 or x.max() > 1.0):
            raise ValidationError("Independent marginals must lie in [0, 1].", code='range')
        self.k = float(k)
        if x.sum() > self.k + BUDGET_SLACK:
            raise ValidationError(f"Marginals sum to {x.sum():.6f}, above budget {self.k}.", code='budget')
        x.flags.writeable = False
        self.x = x

    def __repr__(self):
        return f"IndependentSolution(n={self.x.size}, size={self.x.sum():.4f}, k={self.k})"

    def __eq__(self, other):
        if not isinstance(other, IndependentSolution):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.x, other.x)

    __hash__ = None


class SetDistribution:
    """
    Finite-support distribution over seed sets with expected size <= k

    The support is canonical: node sets sorted, duplicate sets merged,
    entries ordered by their node tuples, zero weights dropped.
    """

    kind = 'distribution'

    def __init__(self, support, k):
        merged = {}
        for nodes, weight in support:
            weight = float(weight)
            if weight < 0.0:
                raise ValidationError("Distribution weights cannot be negative.", code='distribution')
            if weight > 0.0:
                key = _node_tuple(nodes)
                merged[key] = merged.get(key, 0.0) + weight

        mass = sum(merged.values())
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise ValidationError(f"Distribution weights sum to {mass!r}, not 1.", code='distribution')

        self.support = tuple(SupportEntry(nodes, merged[nodes]) for nodes in sorted(merged))
        self.k = float(k)
        size = self.expected_size
        if size > self.k + BUDGET_SLACK:
            raise ValidationError(f"Expected size {size:.6f} exceeds budget {self.k}.", code='budget')

    @classmethod
    def from_weights(cls, sets, weights, k, threshold=1e-12):
        """
        Build from raw (e.g. LP) weights: clip below `threshold` to zero and renormalize
        """
        weights = np.clip(np.asarray(weights, dtype=np.float64), 0.0, None)
        weights[weights < threshold] = 0.0
        total = weights.sum()
        if total <= 0.0:
            return cls.point_mass((), k)
        return cls(zip(sets, weights / total), k)

    @classmethod
    def point_mass(cls, nodes, k=None):
        nodes = _node_tuple(nodes)
        return cls([(nodes, 1.0)], len(nodes) if k is None else k)

    def __repr__(self):
        return f"SetDistribution(support={len(self.support)}, k={self.k})"

    def __eq__(self, other):
        if not isinstance(other, SetDistribution):
            return NotImplemented
        return self.k == other.k and self.support == other.support

    __hash__ = None

    def __len__(self):
        return len(self.support)

    def __iter__(self):
        return iter(self.support)

    @property
    def expected_size(self):
        return float(sum(entry.weight * len(entry.nodes) for entry in self.support))

    def scaled(self, factor):
        """Support entries with weights multiplied by `factor` (for mixtures)"""
        return [(entry.nodes, entry.weight * factor) for entry in self.support]
