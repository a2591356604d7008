# graph_core/types.py
from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from django.core.exceptions import ValidationError
from scipy import sparse


def _frozen(array):
    array.flags.writeable = False
    return array


class Graph:
    """
    Directed graph on dense node ids 0..n-1 with one activation weight per edge

    Edges are kept in canonical (source, target) order. Parallel edges are
    merged keeping the weight of the first occurrence. A weight of NaN means
    "not assigned yet" (see assign_uniform_weights).
    """

    def __init__(self, node_count, sources, targets, weights=None, labels=None):
        node_count = int(node_count)
        if node_count < 0:
            raise ValidationError("Node count cannot be negative.", code='argument')

        sources = np.asarray(sources, dtype=np.int64).reshape(-1)
        targets = np.asarray(targets, dtype=np.int64).reshape(-1)
        if sources.shape != targets.shape:
            raise ValidationError("Sources and targets must have the same length.", code='argument')
        if weights is None:
            weights = np.full(sources.shape, np.nan)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if weights.shape != sources.shape:
            raise ValidationError("One weight per edge is required.", code='argument')

        if sources.size and (sources.min() < 0 or targets.min() < 0
                             or sources.max() >= node_count or targets.max() >= node_count):
            raise ValidationError(f"Edge endpoints must lie in [0, {node_count}).", code='argument')
        assigned = weights[~np.isnan(weights)]
        if assigned.size and (assigned.min() < 0.0 or assigned.max() > 1.0):
            raise ValidationError("Edge weights must lie in [0, 1].", code='range')

        # first occurrence wins, then canonical order
        keys = sources * max(node_count, 1) + targets
        _, first = np.unique(keys, return_index=True)
        first.sort()
        order = np.lexsort((targets[first], sources[first]))
        keep = first[order]

        self.node_count = node_count
        self.sources = _frozen(sources[keep])
        self.targets = _frozen(targets[keep])
        self.weights = _frozen(weights[keep])

        if labels is None:
            labels = [str(v) for v in range(node_count)]
        labels = tuple(str(label) for label in labels)
        if len(labels) != node_count:
            raise ValidationError("One label per node is required.", code='argument')
        self.labels = labels

    def __repr__(self):
        return f"Graph(n={self.node_count}, edges={self.edge_count})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.labels == other.labels
            and np.array_equal(self.sources, other.sources)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.weights, other.weights, equal_nan=True)
        )

    __hash__ = None

    @property
    def n(self):
        return self.node_count

    @property
    def edge_count(self):
        return int(self.sources.size)

    @property
    def has_weights(self):
        return not np.isnan(self.weights).any()

    @cached_property
    def label_index(self):
        """Token -> dense id"""
        return {label: node for node, label in enumerate(self.labels)}

    @cached_property
    def out_degree(self):
        return _frozen(np.bincount(self.sources, minlength=self.node_count))

    @cached_property
    def in_degree(self):
        return _frozen(np.bincount(self.targets, minlength=self.node_count))

    @cached_property
    def in_edge_order(self):
        """Edge indices grouped by target (stable, so sources stay ascending)"""
        return _frozen(np.argsort(self.targets, kind='stable'))

    @cached_property
    def in_edge_offsets(self):
        offsets = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(self.in_degree, out=offsets[1:])
        return _frozen(offsets)

    def in_neighbors(self, node):
        """N_v: sources of the edges entering `node`, ascending"""
        start, stop = self.in_edge_offsets[node], self.in_edge_offsets[node + 1]
        return self.sources[self.in_edge_order[start:stop]]

    def out_neighbors(self, node):
        start, stop = np.searchsorted(self.sources, [node, node + 1])
        return self.targets[start:stop]

    def adjacency(self, mask=None):
        """
        CSR adjacency with unit entries

        Args:
            mask: optional boolean edge mask selecting a subset of the edges

        Returns:
            scipy.sparse.csr_matrix of shape (n, n)
        """
        sources, targets = self.sources, self.targets
        if mask is not None:
            sources, targets = sources[mask], targets[mask]
        data = np.ones(sources.size, dtype=np.int8)
        return sparse.csr_matrix(
            (data, (sources, targets)), shape=(self.node_count, self.node_count)
        )

    def with_weights(self, weights):
        return Graph(self.node_count, self.sources, self.targets, weights, self.labels)

    def subgraph(self, nodes):
        """
        Induced subgraph on `nodes`, re-densified preserving relative order

        Returns:
            Graph: the induced subgraph (labels carried over)
        """
        nodes = np.unique(np.asarray(list(nodes), dtype=np.int64))
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        keep = (remap[self.sources] >= 0) & (remap[self.targets] >= 0)
        return Graph(
            nodes.size,
            remap[self.sources[keep]],
            remap[self.targets[keep]],
            self.weights[keep],
            [self.labels[v] for v in nodes],
        )


class CommunityStructure:
    """
    m non-empty, possibly overlapping node groups of one graph

    Communities need not cover the node set.
    """

    def __init__(self, communities: Sequence[Iterable[int]], node_count, names=None):
        node_count = int(node_count)
        members = [np.unique(np.asarray(list(community), dtype=np.int64)) for community in communities]

        if not members:
            raise ValidationError("At least one community is required.", code='empty')
        for index, community in enumerate(members):
            if community.size == 0:
                raise ValidationError(f"Community {index} is empty.", code='empty')
            if community[0] < 0 or community[-1] >= node_count:
                raise ValidationError(
                    f"Community {index} has members outside [0, {node_count}).", code='unknown_node'
                )

        if names is None:
            names = [str(index) for index in range(len(members))]
        names = tuple(str(name) for name in names)
        if len(names) != len(members):
            raise ValidationError("One name per community is required.", code='argument')

        for community in members:
            community.flags.writeable = False
        self.members = tuple(members)
        self.names = names
        self.node_count = node_count

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, index):
        return self.members[index]

    def __repr__(self):
        return f"CommunityStructure(m={self.m}, n={self.node_count})"

    def __eq__(self, other):
        if not isinstance(other, CommunityStructure):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.names == other.names
            and len(self.members) == len(other.members)
            and all(np.array_equal(a, b) for a, b in zip(self.members, other.members))
        )

    __hash__ = None

    @property
    def m(self):
        return len(self.members)

    @cached_property
    def sizes(self):
        return _frozen(np.array([community.size for community in self.members], dtype=np.int64))

    @cached_property
    def averaging_matrix(self):
        """(m, n) sparse matrix whose row C holds 1/|C| on the members of C"""
        rows = np.repeat(np.arange(self.m), self.sizes)
        cols = np.concatenate(self.members)
        data = np.repeat(1.0 / self.sizes, self.sizes)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.m, self.node_count))

    def as_sets(self):
        return [frozenset(int(v) for v in community) for community in self.members]
