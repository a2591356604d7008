# fixtures/types.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple


class FactCheck(NamedTuple):
    label: str
    expected: float
    observed: float
    passed: bool


@dataclass(frozen=True)
class TheoryInstance:
    """
    A small instance with closed-form ground truth

    `facts` maps a label to its analytic value; `solutions` holds the named
    strategies those facts talk about. `verified` is set once every fact
    was re-derived by exact enumeration; `checks` records how.
    """

    name: str
    graph: object
    communities: object
    k: int
    facts: dict = field(default_factory=dict)
    solutions: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    verified: bool = False
    checks: tuple = ()

    def __repr__(self):
        state = 'verified' if self.verified else 'unverified'
        return f"TheoryInstance({self.name!r}, n={self.graph.node_count}, k={self.k}, {state})"
