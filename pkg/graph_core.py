#!/usr/bin/env python3
"""
Weighted undirected graph and the edge-weight statistics used by
node2vec+ (loose/tight edges) and ARGEW (min, max, median weight)
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from errors import GraphError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, float]


class EdgeTightness(str, Enum):
    LOOSE = "loose"
    TIGHT = "tight"


@dataclass(frozen=True)
class WeightStats:
    min_weight: float
    max_weight: float
    median_weight: float
    avg_weight_per_node: np.ndarray


class WeightedGraph:
    """
    Immutable undirected graph stored as a symmetric CSR matrix.

    Row u holds the neighbors of u sorted ascending by id, with the
    edge weights as data. Use build_graph() to construct one.
    """

    def __init__(self, adjacency: sp.csr_matrix):
        adjacency = adjacency.tocsr()
        adjacency.sort_indices()
        self._adjacency = adjacency
        self._indptr = adjacency.indptr.astype(np.int64)
        self._indices = adjacency.indices.astype(np.int64)
        self._data = adjacency.data.astype(np.float64)
        for array in (self._indptr, self._indices, self._data):
            array.flags.writeable = False

        degrees = np.diff(self._indptr)
        self._degrees = degrees
        self._avg_weight = _average_weights(self._indptr, self._data, degrees)
        self._avg_weight.flags.writeable = False

    @property
    def node_count(self) -> int:
        return int(self._adjacency.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self._data.shape[0] // 2)

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._adjacency

    @property
    def avg_weights(self) -> np.ndarray:
        """d̃(u) for every node, 0 for isolated nodes"""
        return self._avg_weight

    def check_node(self, u: int) -> None:
        if isinstance(u, bool) or not isinstance(u, (int, np.integer)):
            raise GraphError(f"node id must be an integer, got {u!r}")
        if u < 0 or u >= self.node_count:
            raise GraphError(
                f"node id {u} out of range for graph with {self.node_count} nodes"
            )

    def degree(self, u: int) -> int:
        return int(self._degrees[u])

    def degrees(self) -> np.ndarray:
        return self._degrees.copy()

    def neighbor_ids(self, u: int) -> np.ndarray:
        return self._indices[self._indptr[u] : self._indptr[u + 1]]

    def neighbor_weights(self, u: int) -> np.ndarray:
        return self._data[self._indptr[u] : self._indptr[u + 1]]

    def neighbors(self, u: int) -> List[Tuple[int, float]]:
        """Sorted (neighbor id, weight) pairs of u"""
        return [
            (int(v), float(w))
            for v, w in zip(self.neighbor_ids(u), self.neighbor_weights(u))
        ]

    def weight(self, u: int, v: int) -> float:
        """w(u, v), or 0.0 when there is no edge"""
        ids = self.neighbor_ids(u)
        pos = int(np.searchsorted(ids, v))
        if pos < ids.shape[0] and ids[pos] == v:
            return float(self.neighbor_weights(u)[pos])
        return 0.0

    def has_edge(self, u: int, v: int) -> bool:
        return self.weight(u, v) > 0.0

    def edges(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, v, w) arrays of every undirected edge once, u < v, sorted by (u, v)"""
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self._degrees)
        upper = rows < self._indices
        return rows[upper], self._indices[upper], self._data[upper]

    def edge_weights(self) -> np.ndarray:
        return self.edges()[2]

    def __repr__(self) -> str:
        return f"WeightedGraph(nodes={self.node_count}, edges={self.edge_count})"


def _average_weights(
    indptr: np.ndarray, data: np.ndarray, degrees: np.ndarray
) -> np.ndarray:
    avg = np.zeros(degrees.shape[0], dtype=np.float64)
    occupied = degrees > 0
    if not occupied.any():
        return avg
    starts = indptr[:-1][occupied]
    sums = np.add.reduceat(data, starts)
    lows = np.minimum.reduceat(data, starts)
    highs = np.maximum.reduceat(data, starts)
    # uniform rows keep their exact weight so w == d̃ holds without round-off
    avg[occupied] = np.where(lows == highs, lows, sums / degrees[occupied])
    return avg


def build_graph(
    edges: Iterable[Sequence], node_count: Optional[int] = None
) -> WeightedGraph:
    """
    Build a symmetric graph from (u, v, w) triples.

    Identical duplicates (in either direction) collapse to one edge;
    self-loops, non-positive weights and conflicting duplicate weights
    are rejected. node_count may be given to include trailing isolated
    nodes.
    """
    seen: Dict[Tuple[int, int], Tuple[float, int]] = {}
    max_id = -1

    for index, edge in enumerate(edges):
        try:
            u, v, w = edge
        except (TypeError, ValueError):
            raise GraphError(f"edge #{index} is not a (u, v, w) triple: {edge!r}", index)

        for node in (u, v):
            if isinstance(node, bool) or not isinstance(node, (int, np.integer)):
                raise GraphError(f"edge #{index}: node id {node!r} is not an integer", index)
            if node < 0:
                raise GraphError(f"edge #{index}: node id {node} is negative", index)
        u, v = int(u), int(v)
        if u == v:
            raise GraphError(f"edge #{index}: self-loop on node {u}", index)

        try:
            w = float(w)
        except (TypeError, ValueError):
            raise GraphError(f"edge #{index} ({u}, {v}): weight {w!r} is not a number", index)
        if not math.isfinite(w) or w <= 0.0:
            raise GraphError(f"edge #{index} ({u}, {v}): weight must be positive, got {w}", index)

        key = (u, v) if u < v else (v, u)
        if key in seen:
            previous, previous_index = seen[key]
            if previous != w:
                raise GraphError(
                    f"edge #{index} ({u}, {v}): weight {w} conflicts with "
                    f"weight {previous} of edge #{previous_index}",
                    index,
                )
            continue
        seen[key] = (w, index)
        max_id = max(max_id, u, v)

    if node_count is None:
        node_count = max_id + 1
    elif node_count <= max_id:
        raise GraphError(f"node_count {node_count} too small for node id {max_id}")

    if seen:
        pairs = np.array(list(seen.keys()), dtype=np.int64)
        weights = np.array([w for w, _ in seen.values()], dtype=np.float64)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.concatenate([weights, weights])
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0, dtype=np.float64)

    adjacency = sp.csr_matrix((data, (rows, cols)), shape=(node_count, node_count))
    graph = WeightedGraph(adjacency)
    logger.debug(f"Built {graph}")
    return graph


def avg_edge_weight(g: WeightedGraph, u: int) -> float:
    """d̃(u): mean weight of u's edges, 0 for an isolated node"""
    g.check_node(u)
    return float(g.avg_weights[u])


def tightness(g: WeightedGraph, u: int, v: int) -> EdgeTightness:
    """Loose iff there is no edge or w(u, v) < max(d̃(u), d̃(v))"""
    g.check_node(u)
    g.check_node(v)
    if u == v:
        raise GraphError(f"tightness is undefined for a node with itself ({u})")
    w = g.weight(u, v)
    if w == 0.0:
        return EdgeTightness.LOOSE
    if w < max(g.avg_weights[u], g.avg_weights[v]):
        return EdgeTightness.LOOSE
    return EdgeTightness.TIGHT


def weight_stats(g: WeightedGraph) -> WeightStats:
    """Global min / max / median edge weight (each undirected edge counted once)"""
    if g.edge_count == 0:
        raise GraphError("weight statistics need a graph with at least one edge")
    weights = g.edge_weights()
    return WeightStats(
        min_weight=float(weights.min()),
        max_weight=float(weights.max()),
        median_weight=float(np.median(weights)),
        avg_weight_per_node=g.avg_weights.copy(),
    )
