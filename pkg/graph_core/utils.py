# graph_core/utils.py
import logging
from collections import deque

import numpy as np
from django.core.exceptions import ValidationError
from scipy.sparse import csgraph

from .types import CommunityStructure, Graph

logger = logging.getLogger(__name__)

COMMUNITY_SCHEMES = ('singleton', 'random', 'bfs', 'random_overlap')


def _content_lines(text):
    """Yield (line_number, tokens) for every non-blank, non-comment line"""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if line:
            yield number, line.split()


def load_edge_list(text, directed=True):
    """
    Parse a whitespace-separated edge list

    Each content line is `u v [w]`; node tokens are remapped to dense ids in
    order of first appearance.

    Args:
        text (str): edge-list document
        directed (bool): when False every line yields both directions

    Returns:
        Graph: parsed graph, weights NaN where no weight was given

    Raises:
        ValidationError: `parse` for malformed lines, `range` for w outside [0, 1]
    """
    index = {}
    sources, targets, weights = [], [], []

    for number, tokens in _content_lines(text):
        if len(tokens) not in (2, 3):
            raise ValidationError(
                f"Line {number}: expected 'u v [w]', got {len(tokens)} fields.", code='parse'
            )
        weight = np.nan
        if len(tokens) == 3:
            try:
                weight = float(tokens[2])
            except ValueError:
                raise ValidationError(f"Line {number}: weight {tokens[2]!r} is not a number.", code='parse')
            if not 0.0 <= weight <= 1.0:
                raise ValidationError(f"Line {number}: weight {weight} is outside [0, 1].", code='range')

        u = index.setdefault(tokens[0], len(index))
        v = index.setdefault(tokens[1], len(index))
        sources.append(u)
        targets.append(v)
        weights.append(weight)
        if not directed:
            sources.append(v)
            targets.append(u)
            weights.append(weight)

    graph = Graph(len(index), sources, targets, weights, labels=list(index))
    logger.debug("Loaded edge list: %s (directed=%s)", graph, directed)
    return graph


def dump_edge_list(graph):
    """Serialize a graph back to the edge-list format, one directed edge per line"""
    lines = []
    for u, v, w in zip(graph.sources, graph.targets, graph.weights):
        line = f"{graph.labels[u]} {graph.labels[v]}"
        if not np.isnan(w):
            line += f" {float(w)!r}"
        lines.append(line)
    return '\n'.join(lines) + ('\n' if lines else '')


def _undirected(node_count, pairs, labels=None):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    sources = np.concatenate([pairs[:, 0], pairs[:, 1]])
    targets = np.concatenate([pairs[:, 1], pairs[:, 0]])
    return Graph(node_count, sources, targets, labels=labels)


def generate_barabasi_albert(n, m_attach, rng_seed):
    """
    Preferential-attachment graph stored bidirected

    Starts from a clique on m_attach + 1 nodes; every further node attaches to
    m_attach distinct existing nodes drawn proportionally to degree (repeats
    are discarded and redrawn).

    Raises:
        ValidationError: `argument` unless n > m_attach >= 1
    """
    if m_attach < 1 or n <= m_attach:
        raise ValidationError(f"Need n > m_attach >= 1, got n={n}, m_attach={m_attach}.", code='argument')

    rng = np.random.default_rng(rng_seed)
    seed_nodes = m_attach + 1
    pairs = [(u, v) for u in range(seed_nodes) for v in range(u + 1, seed_nodes)]
    # one entry per edge endpoint, so a uniform pick is degree-proportional
    endpoints = [node for pair in pairs for node in pair]

    for node in range(seed_nodes, n):
        chosen = set()
        while len(chosen) < m_attach:
            chosen.add(endpoints[rng.integers(len(endpoints))])
        for target in sorted(chosen):
            pairs.append((node, target))
            endpoints.extend((node, target))

    graph = _undirected(n, pairs)
    logger.debug("Generated Barabasi-Albert graph %s (m_attach=%d, seed=%s)", graph, m_attach, rng_seed)
    return graph


def assign_uniform_weights(graph, w_max, rng_seed):
    """
    Draw every edge weight i.i.d. uniform on [0, w_max]

    Returns:
        Graph: a copy of `graph` carrying the new weights
    """
    if not 0.0 < w_max <= 1.0:
        raise ValidationError(f"w_max must lie in (0, 1], got {w_max}.", code='range')
    rng = np.random.default_rng(rng_seed)
    return graph.with_weights(rng.uniform(0.0, w_max, size=graph.edge_count))


def scale_in_weights(graph):
    """Scale the in-weights of every node whose in-weight sum exceeds 1 down to sum 1"""
    totals = np.bincount(graph.targets, weights=graph.weights, minlength=graph.node_count)
    factor = np.maximum(totals, 1.0)
    return graph.with_weights(graph.weights / factor[graph.targets])


def largest_weakly_connected_component(graph):
    """
    Restrict a graph to its largest weakly connected component

    Ties between equally large components go to the one holding the lowest
    node id.

    Returns:
        tuple: (Graph, kept original node ids)
    """
    if graph.node_count == 0:
        return graph, np.zeros(0, dtype=np.int64)
    _, component = csgraph.connected_components(graph.adjacency(), directed=True, connection='weak')
    sizes = np.bincount(component)
    winner = component[np.flatnonzero(sizes[component] == sizes.max())[0]]
    kept = np.flatnonzero(component == winner)
    logger.debug("Largest weak component keeps %d of %d nodes", kept.size, graph.node_count)
    return graph.subgraph(kept), kept


def _bfs_communities(graph, m, rng):
    n = graph.node_count
    base, remainder = divmod(n, m)
    targets = [base + (1 if index < remainder else 0) for index in range(m)]
    assigned = np.zeros(n, dtype=bool)
    communities = []

    for target in targets:
        community = []
        queue = deque()
        while len(community) < target:
            if not queue:
                # frontier exhausted: restart from a fresh random node
                free = np.flatnonzero(~assigned)
                source = int(free[rng.integers(free.size)])
                assigned[source] = True
                community.append(source)
                queue.append(source)
                continue
            node = queue.popleft()
            for neighbor in graph.out_neighbors(node):
                if len(community) >= target:
                    break
                if not assigned[neighbor]:
                    assigned[neighbor] = True
                    community.append(int(neighbor))
                    queue.append(int(neighbor))
        communities.append(community)
    return communities


def build_communities(graph, scheme, m=None, rng_seed=None):
    """
    Build a community structure from one of the generator schemes

    Args:
        graph (Graph): the graph the communities refer to
        scheme (str): singleton, random, bfs or random_overlap
        m (int): number of communities (ignored for singleton)
        rng_seed: seed for the scheme's random choices

    Returns:
        CommunityStructure

    Raises:
        ValidationError: `argument` for unknown schemes, m < 1, or m > n
    """
    n = graph.node_count
    rng = np.random.default_rng(rng_seed)

    if scheme == 'singleton':
        return CommunityStructure([[v] for v in range(n)], n, names=graph.labels)

    if scheme not in COMMUNITY_SCHEMES:
        raise ValidationError(
            f"Unknown community scheme {scheme!r}; choose one of {', '.join(COMMUNITY_SCHEMES)}.",
            code='argument',
        )
    if m is None or m < 1:
        raise ValidationError(f"Scheme {scheme!r} needs m >= 1.", code='argument')
    if scheme in ('random', 'bfs') and m > n:
        raise ValidationError(f"Cannot build {m} {scheme} communities on {n} nodes.", code='argument')

    if scheme == 'random':
        labels = rng.integers(m, size=n)
        communities = [np.flatnonzero(labels == index) for index in range(m)]
    elif scheme == 'bfs':
        communities = _bfs_communities(graph, m, rng)
    else:
        # option i < m: community i only; m: none; m + 1: all
        options = rng.integers(m + 2, size=n)
        everywhere = options == m + 1
        communities = [np.flatnonzero((options == index) | everywhere) for index in range(m)]

    kept = [(index, community) for index, community in enumerate(communities) if len(community)]
    structure = CommunityStructure(
        [community for _, community in kept], n, names=[str(index) for index, _ in kept]
    )
    logger.debug("Built %s communities: %s", scheme, structure)
    return structure


def load_communities(text, graph):
    """
    Parse `node_id community_id` lines against a graph's node tokens

    A node may appear on several lines; communities are ordered by first
    appearance of their id.

    Raises:
        ValidationError: `parse` for malformed lines, `unknown_node` for ids
            the graph does not know, `empty` when no community is listed
    """
    groups = {}
    for number, tokens in _content_lines(text):
        if len(tokens) != 2:
            raise ValidationError(f"Line {number}: expected 'node_id community_id'.", code='parse')
        node_token, community_id = tokens
        node = graph.label_index.get(node_token)
        if node is None:
            raise ValidationError(f"Line {number}: unknown node id {node_token!r}.", code='unknown_node')
        groups.setdefault(community_id, []).append(node)

    if not groups:
        raise ValidationError("The community file lists no communities.", code='empty')
    return CommunityStructure(list(groups.values()), graph.node_count, names=list(groups))
