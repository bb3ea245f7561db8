#!/usr/bin/env python3
"""
Synthetic benchmark graphs: the 19-node structural-roles graph with its
node-type categorization, and the two-clique classification smoke graph
"""

import logging
import operator
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, List, Tuple

from argew_augment import Corpus, augment_corpus
from errors import GraphError
from eval_suite import CoappearanceTable, coappearance_distribution
from graph_core import WeightedGraph, build_graph
from utils import derive_seed
from walk_sampler import WalkConfig, WalkStrategy, sample_walks, split_windows

logger = logging.getLogger(__name__)

ROLES_NODE_COUNT = 19

# bridge id -> internal ids
COMMUNITIES: Dict[int, Tuple[int, ...]] = {
    4: (0, 1, 2, 3),
    13: (9, 10, 11, 12),
    18: (14, 15, 16, 17),
}
ETC_NODES: Tuple[int, ...] = (5, 6, 7, 8)

# Coappearance experiment settings
BASELINE_WALKS_PER_NODE = 20
ARGEW_WALKS_PER_NODE = 5
EXPERIMENT_WALK_LENGTH = 10
EXPERIMENT_CONTEXT_SIZE = 3
EXPERIMENT_LOW = 1.0
EXPERIMENT_HIGH = 9.0


class NodeType(str, Enum):
    C4_INTERNAL = "c4internal"
    C4_BRIDGE = "c4bridge"
    C13_INTERNAL = "c13internal"
    C13_BRIDGE = "c13bridge"
    C18_INTERNAL = "c18internal"
    C18_BRIDGE = "c18bridge"
    ETC = "etc"


_BRIDGE_TYPES = {4: NodeType.C4_BRIDGE, 13: NodeType.C13_BRIDGE, 18: NodeType.C18_BRIDGE}
_INTERNAL_TYPES = {4: NodeType.C4_INTERNAL, 13: NodeType.C13_INTERNAL, 18: NodeType.C18_INTERNAL}


@dataclass(frozen=True)
class RolesGraphSpec:
    community_weight: float = 3.0
    bridge_etc_weight: float = 2.0
    internal_etc_weight: float = 1.0


def internal_etc_assignment() -> Dict[int, int]:
    """Internals in ascending id matched round-robin to etc nodes 5..8"""
    internals = sorted(v for members in COMMUNITIES.values() for v in members)
    return {v: ETC_NODES[i % len(ETC_NODES)] for i, v in enumerate(internals)}


def roles_edges(spec: RolesGraphSpec = RolesGraphSpec()) -> List[Tuple[int, int, float]]:
    edges: List[Tuple[int, int, float]] = []
    for bridge, internals in COMMUNITIES.items():
        for u, v in combinations(sorted((bridge,) + internals), 2):
            edges.append((u, v, spec.community_weight))
        for etc in ETC_NODES:
            edges.append((bridge, etc, spec.bridge_etc_weight))
    for internal, etc in internal_etc_assignment().items():
        edges.append((internal, etc, spec.internal_etc_weight))
    return edges


def build_roles_graph(spec: RolesGraphSpec = RolesGraphSpec()) -> WeightedGraph:
    return build_graph(roles_edges(spec), node_count=ROLES_NODE_COUNT)


def node_type(v: int) -> NodeType:
    try:
        v = operator.index(v)
    except TypeError:
        raise GraphError(f"node id must be an integer, got {v!r}")
    if not 0 <= v < ROLES_NODE_COUNT:
        raise GraphError(f"node {v!r} is not in the roles graph (0..{ROLES_NODE_COUNT - 1})")
    if v in _BRIDGE_TYPES:
        return _BRIDGE_TYPES[v]
    for bridge, internals in COMMUNITIES.items():
        if v in internals:
            return _INTERNAL_TYPES[bridge]
    return NodeType.ETC


def roles_labels() -> List[str]:
    return [node_type(v).value for v in range(ROLES_NODE_COUNT)]


def experiment_walk_config(
    use_argew: bool,
    p: float,
    q: float,
    seed: int,
    strategy: WalkStrategy = WalkStrategy.NODE2VEC,
) -> WalkConfig:
    return WalkConfig(
        strategy=strategy,
        p=p,
        q=q,
        walk_length=EXPERIMENT_WALK_LENGTH,
        walks_per_node=ARGEW_WALKS_PER_NODE if use_argew else BASELINE_WALKS_PER_NODE,
        context_size=EXPERIMENT_CONTEXT_SIZE,
        seed=derive_seed(seed, "walk"),
    )


def coappearance_corpus(
    use_argew: bool,
    p: float,
    q: float,
    seed: int,
    strategy: WalkStrategy = WalkStrategy.NODE2VEC,
) -> Corpus:
    g = build_roles_graph()
    params = experiment_walk_config(use_argew, p, q, seed, strategy)
    windows = [
        window
        for walk in sample_walks(g, params)
        for window in split_windows(walk, params.context_size)
    ]
    if use_argew:
        return augment_corpus(g, windows, EXPERIMENT_LOW, EXPERIMENT_HIGH)
    return Corpus.from_windows(windows)


def run_coappearance_experiment(
    use_argew: bool,
    p: float,
    q: float,
    seed: int,
    strategy: WalkStrategy = WalkStrategy.NODE2VEC,
) -> CoappearanceTable:
    """
    Coappearance proportions of roles-graph node types.

    Baseline: 20 walks per node; ARGEW: 5 walks per node with low=1,
    high=9. Both use walk length 10 and windows of 3 nodes.
    """
    corpus = coappearance_corpus(use_argew, p, q, seed, strategy)
    logger.info(
        f"Coappearance experiment (argew={use_argew}, p={p}, q={q}, seed={seed}): {corpus!r}"
    )
    return coappearance_distribution(
        corpus, lambda v: node_type(v).value, types=[t.value for t in NodeType]
    )


def coappearance_differences(table: CoappearanceTable, community: int) -> Tuple[float, float]:
    """
    |bridge row - internal row| of one community, in the "with same-community
    internals" and "with etc" columns
    """
    if community not in COMMUNITIES:
        raise GraphError(f"node {community} is not a community bridge (expected one of 4, 13, 18)")
    bridge = _BRIDGE_TYPES[community].value
    internal = _INTERNAL_TYPES[community].value
    etc = NodeType.ETC.value
    internal_diff = abs(table.proportion(bridge, internal) - table.proportion(internal, internal))
    etc_diff = abs(table.proportion(bridge, etc) - table.proportion(internal, etc))
    return internal_diff, etc_diff


def build_two_cliques(clique_size: int = 8, weight: float = 1.0) -> WeightedGraph:
    """Two disconnected uniform-weight cliques on ids 0..k-1 and k..2k-1"""
    if clique_size < 2:
        raise GraphError(f"clique_size must be >= 2, got {clique_size}")
    edges = [
        (offset + u, offset + v, weight)
        for offset in (0, clique_size)
        for u, v in combinations(range(clique_size), 2)
    ]
    return build_graph(edges, node_count=2 * clique_size)


def two_cliques_labels(clique_size: int = 8) -> List[str]:
    return ["a"] * clique_size + ["b"] * clique_size
