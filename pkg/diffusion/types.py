# diffusion/types.py
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


class LiveEdgeGraph:
    """One sampled outcome: the subset of a graph's edges that are live"""

    def __init__(self, graph, mask):
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.size != graph.edge_count:
            raise ValueError("Live-edge mask must have one entry per edge.")
        mask.flags.writeable = False
        self.graph = graph
        self.mask = mask

    def __repr__(self):
        return f"LiveEdgeGraph(live={int(self.mask.sum())}/{self.graph.edge_count})"

    @cached_property
    def adjacency(self):
        return self.graph.adjacency(self.mask)


class LiveEdgeSample:
    """
    Ordered collection M of live-edge graphs drawn from one graph and model

    Each member carries a probability weight; sampled collections use the
    uniform weight 1/|M|, enumerated outcome spaces use the outcome
    probabilities, so every estimator averages with `weights`.

    Reachability is answered over all members at once on the block-diagonal
    stacking of the live-edge graphs; cells are addressed by the flat index
    L * n + v.
    """

    def __init__(self, graph, masks, model='IC', rng_seed=None, weights=None):
        masks = np.atleast_2d(np.asarray(masks, dtype=bool))
        if masks.shape[0] < 1:
            raise ValueError("A live-edge sample needs at least one member.")
        if masks.shape[1] != graph.edge_count:
            raise ValueError("Live-edge masks must have one column per edge.")
        if weights is None:
            weights = np.full(masks.shape[0], 1.0 / masks.shape[0])
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (masks.shape[0],):
            raise ValueError("One weight per live-edge graph is required.")

        masks.flags.writeable = False
        weights.flags.writeable = False
        self.graph = graph
        self.masks = masks
        self.model = model
        self.rng_seed = rng_seed
        self.weights = weights
        self._reach_cache = {}
        self._lock = threading.Lock()

    def __len__(self):
        return self.masks.shape[0]

    def __getitem__(self, index):
        return LiveEdgeGraph(self.graph, self.masks[index])

    def __iter__(self):
        return (self[index] for index in range(len(self)))

    def __repr__(self):
        return f"LiveEdgeSample(size={len(self)}, model={self.model!r}, seed={self.rng_seed})"

    @property
    def size(self):
        return len(self)

    @property
    def node_count(self):
        return self.graph.node_count

    @cached_property
    def cell_weights(self):
        """Weight of every (L, v) cell, flattened"""
        return np.repeat(self.weights, self.node_count)

    @cached_property
    def stacked(self):
        n = self.node_count
        member, edge = np.nonzero(self.masks)
        rows = member * n + self.graph.sources[edge]
        cols = member * n + self.graph.targets[edge]
        total = len(self) * n
        return sparse.csr_matrix(
            (np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(total, total)
        )

    def reach_of(self, seeds):
        """
        Flat indices of every (L, v) with v reachable from `seeds` in L

        Returns:
            np.ndarray: sorted int64 flat indices
        """
        seeds = np.unique(np.asarray(list(seeds), dtype=np.int64))
        if seeds.size == 0 or self.node_count == 0:
            return np.zeros(0, dtype=np.int64)
        if seeds.size == 1:
            return self.reach_from(int(seeds[0]))
        return self._multi_source(seeds)

    def reach_from(self, node):
        """Memoized reach of a single source across all members"""
        cached = self._reach_cache.get(node)
        if cached is None:
            cached = self._multi_source(np.array([node], dtype=np.int64))
            cached.flags.writeable = False
            with self._lock:
                self._reach_cache[node] = cached
        return cached

    def _multi_source(self, seeds):
        starts = (np.arange(len(self))[:, None] * self.node_count + seeds[None, :]).ravel()
        distances = csgraph.dijkstra(
            self.stacked, directed=True, indices=starts, unweighted=True, min_only=True
        )
        return np.flatnonzero(np.isfinite(distances))


@dataclass(frozen=True)
class CoverageVector:
    """Per-node reach probabilities; `total` is the expected spread"""

    values: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False

    def __len__(self):
        return self.values.size

    def __getitem__(self, node):
        return self.values[node]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def total(self):
        return float(self.values.sum())
