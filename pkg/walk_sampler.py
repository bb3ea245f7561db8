#!/usr/bin/env python3
"""
Second-order biased random walks (node2vec and node2vec+), walk
windowing and skip-gram positive pair extraction
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from errors import WalkError
from graph_core import WeightedGraph

logger = logging.getLogger(__name__)

Walk = List[int]
Window = Tuple[int, ...]


class WalkStrategy(str, Enum):
    NODE2VEC = "node2vec"
    NODE2VEC_PLUS = "node2vecplus"


@dataclass(frozen=True)
class WalkConfig:
    strategy: WalkStrategy = WalkStrategy.NODE2VEC
    p: float = 1.0
    q: float = 1.0
    walk_length: int = 80
    walks_per_node: int = 10
    context_size: int = 10
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "strategy", WalkStrategy(self.strategy))
        except ValueError:
            raise WalkError(f"unknown walk strategy: {self.strategy!r}")
        if not self.p > 0 or not self.q > 0:
            raise WalkError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if self.walk_length < 1:
            raise WalkError(f"walk_length must be >= 1, got {self.walk_length}")
        if self.walks_per_node < 1:
            raise WalkError(f"walks_per_node must be >= 1, got {self.walks_per_node}")
        if self.context_size < 2:
            raise WalkError(f"context_size must be >= 2, got {self.context_size}")
        if not 0 <= self.seed < 2**64:
            raise WalkError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise WalkError(f"workers must be >= 1, got {self.workers}")


def walk_rng(seed: int, start: int, repetition: int) -> np.random.Generator:
    """Independent stream for walk (start node, repetition)"""
    return np.random.default_rng([seed, start, repetition])


def _check_step(g: WeightedGraph, t: Optional[int], v: int) -> np.ndarray:
    g.check_node(v)
    ids = g.neighbor_ids(v)
    if ids.shape[0] == 0:
        raise WalkError(f"node {v} is isolated, no transition is possible")
    if t is not None:
        g.check_node(t)
        if not g.has_edge(t, v):
            raise WalkError(f"previous node {t} is not a neighbor of {v}")
    return ids


def _lookup_weights(g: WeightedGraph, t: int, ids: np.ndarray) -> np.ndarray:
    """w(t, x) for every x in ids, 0 where there is no edge"""
    t_ids = g.neighbor_ids(t)
    t_weights = g.neighbor_weights(t)
    if t_ids.shape[0] == 0:
        return np.zeros(ids.shape[0], dtype=np.float64)
    pos = np.searchsorted(t_ids, ids)
    clipped = np.minimum(pos, t_ids.shape[0] - 1)
    found = (pos < t_ids.shape[0]) & (t_ids[clipped] == ids)
    return np.where(found, t_weights[clipped], 0.0)


def _node2vec_bias(
    g: WeightedGraph, t: int, ids: np.ndarray, p: float, q: float
) -> np.ndarray:
    is_return = ids == t
    t_neighbor = np.isin(ids, g.neighbor_ids(t), assume_unique=True)
    return np.where(is_return, 1.0 / p, np.where(t_neighbor, 1.0, 1.0 / q))


def _node2vecplus_bias(
    g: WeightedGraph, t: int, v: int, ids: np.ndarray, p: float, q: float
) -> np.ndarray:
    avg = g.avg_weights
    w_vx = g.neighbor_weights(v)
    w_tx = _lookup_weights(g, t, ids)
    tx_cap = np.maximum(avg[ids], avg[t])

    tx_tight = (w_tx > 0.0) & (w_tx >= tx_cap)
    vx_tight = w_vx >= np.maximum(avg[v], avg[ids])
    # x and t are both neighbors of v, so tx_cap > 0
    interpolated = 1.0 / q + (1.0 - 1.0 / q) * w_tx / tx_cap

    return np.select(
        [ids == t, tx_tight, ~vx_tight],
        [1.0 / p, 1.0, min(1.0, 1.0 / q)],
        default=interpolated,
    )


def transition_arrays(
    g: WeightedGraph, t: Optional[int], v: int, params: WalkConfig
) -> Tuple[np.ndarray, np.ndarray]:
    """(neighbor ids, unnormalized transition weights) for the step t -> v -> x"""
    ids = _check_step(g, t, v)
    weights = g.neighbor_weights(v)
    if t is None:
        return ids, weights.copy()
    if params.strategy is WalkStrategy.NODE2VEC_PLUS:
        bias = _node2vecplus_bias(g, t, v, ids, params.p, params.q)
    else:
        bias = _node2vec_bias(g, t, ids, params.p, params.q)
    return ids, bias * weights


def transition_weights_node2vec(
    g: WeightedGraph, t: Optional[int], v: int, params: WalkConfig
) -> List[Tuple[int, float]]:
    ids = _check_step(g, t, v)
    weights = g.neighbor_weights(v)
    if t is not None:
        weights = _node2vec_bias(g, t, ids, params.p, params.q) * weights
    return [(int(x), float(w)) for x, w in zip(ids, weights)]


def transition_weights_node2vecplus(
    g: WeightedGraph, t: Optional[int], v: int, params: WalkConfig
) -> List[Tuple[int, float]]:
    ids = _check_step(g, t, v)
    weights = g.neighbor_weights(v)
    if t is not None:
        weights = _node2vecplus_bias(g, t, v, ids, params.p, params.q) * weights
    return [(int(x), float(w)) for x, w in zip(ids, weights)]


def sample_next(
    g: WeightedGraph,
    t: Optional[int],
    v: int,
    params: WalkConfig,
    rng: np.random.Generator,
) -> int:
    """Draw the next node by cumulative-sum inversion over ascending neighbor ids"""
    ids, weights = transition_arrays(g, t, v, params)
    cumulative = np.cumsum(weights)
    draw = rng.random() * cumulative[-1]
    index = int(np.searchsorted(cumulative, draw, side="right"))
    return int(ids[min(index, ids.shape[0] - 1)])


def sample_walk(
    g: WeightedGraph, start: int, params: WalkConfig, rng: np.random.Generator
) -> Walk:
    g.check_node(start)
    walk = [start]
    if g.degree(start) == 0:
        return walk

    previous: Optional[int] = None
    while len(walk) < params.walk_length:
        current = walk[-1]
        walk.append(sample_next(g, previous, current, params, rng))
        previous = current
    return walk


def _walks_from(g: WeightedGraph, start: int, params: WalkConfig) -> List[Walk]:
    return [
        sample_walk(g, start, params, walk_rng(params.seed, start, repetition))
        for repetition in range(params.walks_per_node)
    ]


def sample_walks(g: WeightedGraph, params: WalkConfig) -> List[Walk]:
    """
    walks_per_node walks from every node, ordered by (start node, repetition).

    Each walk draws from its own stream keyed by (seed, node, repetition),
    so the output does not depend on the number of workers.
    """
    starts = range(g.node_count)
    if params.workers > 1:
        with ThreadPoolExecutor(max_workers=params.workers) as pool:
            per_node = list(pool.map(lambda s: _walks_from(g, s, params), starts))
    else:
        per_node = [_walks_from(g, s, params) for s in starts]

    walks = [walk for node_walks in per_node for walk in node_walks]
    logger.info(
        f"Sampled {len(walks)} {params.strategy.value} walks "
        f"(p={params.p}, q={params.q}, length={params.walk_length})"
    )
    return walks


def split_windows(walk: Walk, context_size: int) -> List[Window]:
    """Stride-1 windows of length context_size; a short walk is one window"""
    if context_size < 2:
        raise WalkError(f"context_size must be >= 2, got {context_size}")
    length = len(walk)
    if length < 2:
        return []
    if length < context_size:
        return [tuple(walk)]
    return [
        tuple(walk[i : i + context_size]) for i in range(length - context_size + 1)
    ]


def positive_pairs(window: Window) -> List[Tuple[int, int]]:
    """(first node, each later node) in window order"""
    if len(window) < 2:
        raise WalkError(f"a window needs at least 2 nodes, got {len(window)}")
    center = window[0]
    return [(center, context) for context in window[1:]]
