#!/usr/bin/env python3
"""
ARGEW: augmentation of random-walk windows by graph edge weights.

Every window position is swapped for the maximum-weight neighbor that is
also adjacent to the flanking window nodes. When that weight is strictly
above the graph's median edge weight the source window is added once
more and the derived window floor(2**r) times, r being the substitute
weight min-max rescaled into [low, high].
"""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from errors import AugmentError
from graph_core import WeightedGraph, weight_stats
from walk_sampler import Window, positive_pairs

logger = logging.getLogger(__name__)

# absorbs rescale round-off at integral exponents
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class RescaleSpec:
    low: float
    high: float
    min_weight: float
    max_weight: float

    def __post_init__(self):
        if self.low > self.high:
            raise AugmentError(f"low ({self.low}) must not exceed high ({self.high})")
        if not 0 < self.min_weight <= self.max_weight:
            raise AugmentError(
                f"need 0 < min_weight <= max_weight, got "
                f"{self.min_weight}, {self.max_weight}"
            )

    @classmethod
    def for_graph(cls, g: WeightedGraph, low: float, high: float) -> "RescaleSpec":
        stats = weight_stats(g)
        return cls(low, high, stats.min_weight, stats.max_weight)


@dataclass(frozen=True)
class Substitution:
    position: int
    substitute: int
    weight: float


class Corpus:
    """Ordered multiset of windows stored as (window, count) entries"""

    def __init__(self, entries: Iterable[Tuple[Sequence[int], int]] = ()):
        self._counts: Counter = Counter()
        for window, count in entries:
            self.add(window, count)

    @classmethod
    def from_windows(cls, windows: Iterable[Sequence[int]]) -> "Corpus":
        return cls((window, 1) for window in windows)

    def add(self, window: Sequence[int], count: int = 1) -> None:
        if count < 1:
            raise AugmentError(f"window count must be >= 1, got {count}")
        if len(window) < 2:
            raise AugmentError(f"corpus windows need at least 2 nodes: {window!r}")
        self._counts[tuple(int(v) for v in window)] += count

    @property
    def entries(self) -> List[Tuple[Window, int]]:
        return list(self._counts.items())

    def __iter__(self) -> Iterator[Tuple[Window, int]]:
        return iter(self._counts.items())

    def __len__(self) -> int:
        return len(self._counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.entries == other.entries

    def count(self, window: Sequence[int]) -> int:
        return self._counts.get(tuple(window), 0)

    def total_windows(self) -> int:
        return sum(self._counts.values())

    def pair_count(self) -> int:
        return sum(count * (len(window) - 1) for window, count in self._counts.items())

    def expand(self) -> Iterator[Window]:
        for window, count in self._counts.items():
            for _ in range(count):
                yield window

    def positive_pairs(self) -> Iterator[Tuple[Tuple[int, int], int]]:
        for window, count in self._counts.items():
            for pair in positive_pairs(window):
                yield pair, count

    def __repr__(self) -> str:
        return f"Corpus(unique={len(self)}, total={self.total_windows()})"


@dataclass
class AugmentStats:
    windows: int = 0
    triggered: int = 0
    below_median: int = 0
    no_candidate: int = 0
    derived_copies: int = 0

    def merge(self, other: "AugmentStats") -> None:
        self.windows += other.windows
        self.triggered += other.triggered
        self.below_median += other.below_median
        self.no_candidate += other.no_candidate
        self.derived_copies += other.derived_copies


def rescale_weight(x: float, spec: RescaleSpec) -> float:
    """Min-max rescale x from [min_weight, max_weight] into [low, high]"""
    if not spec.min_weight <= x <= spec.max_weight:
        raise AugmentError(
            f"weight {x} outside [{spec.min_weight}, {spec.max_weight}]"
        )
    if spec.min_weight == spec.max_weight:
        return spec.low
    fraction = (x - spec.min_weight) / (spec.max_weight - spec.min_weight)
    return fraction * (spec.high - spec.low) + spec.low


def augmentation_count(w_sub: float, spec: RescaleSpec) -> int:
    """floor(2 ** rescale_weight(w_sub)) copies of a derived window"""
    return math.floor(2.0 ** rescale_weight(w_sub, spec) + _FLOOR_EPS)


def find_substitute(
    g: WeightedGraph, window: Sequence[int], position: int
) -> Optional[Substitution]:
    """
    Maximum-weight neighbor of window[position] that also neighbors the
    previous and next window nodes (when present). Ties go to the
    smallest id.
    """
    if not 0 <= position < len(window):
        raise AugmentError(f"position {position} outside window of length {len(window)}")

    v = window[position]
    candidates = set(g.neighbor_ids(v).tolist())
    if position > 0:
        candidates.intersection_update(g.neighbor_ids(window[position - 1]).tolist())
    if position + 1 < len(window):
        candidates.intersection_update(g.neighbor_ids(window[position + 1]).tolist())

    best: Optional[int] = None
    best_weight = 0.0
    for candidate in sorted(candidates):
        weight = g.weight(v, candidate)
        if best_weight < weight:
            best, best_weight = candidate, weight

    if best is None:
        return None
    return Substitution(position, best, best_weight)


def _augment_window(
    g: WeightedGraph, window: Window, median: float, spec: RescaleSpec
) -> Tuple[List[Tuple[Window, int]], AugmentStats]:
    additions: List[Tuple[Window, int]] = [(window, 1)]
    stats = AugmentStats(windows=1)

    for position in range(len(window)):
        substitution = find_substitute(g, window, position)
        if substitution is None:
            stats.no_candidate += 1
            continue
        if not median < substitution.weight:
            stats.below_median += 1
            continue

        derived = list(window)
        derived[position] = substitution.substitute
        copies = augmentation_count(substitution.weight, spec)
        additions.append((window, 1))
        if copies > 0:
            additions.append((tuple(derived), copies))
        stats.triggered += 1
        stats.derived_copies += copies

    return additions, stats


def augment_corpus_with_stats(
    g: WeightedGraph,
    windows: Sequence[Window],
    low: float,
    high: float,
    workers: int = 1,
) -> Tuple[Corpus, AugmentStats]:
    stats = weight_stats(g)
    spec = RescaleSpec(low, high, stats.min_weight, stats.max_weight)
    median = stats.median_weight

    def augment(window: Sequence[int]):
        return _augment_window(g, tuple(int(v) for v in window), median, spec)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(augment, windows))
    else:
        results = [augment(window) for window in windows]

    corpus = Corpus()
    totals = AugmentStats()
    for additions, window_stats in results:
        for window, count in additions:
            corpus.add(window, count)
        totals.merge(window_stats)

    logger.info(
        f"ARGEW augmented {totals.windows} windows (median weight {median}, "
        f"range [{low}, {high}]): {totals.triggered} substitutions triggered, "
        f"{totals.derived_copies} derived copies, corpus {corpus!r}"
    )
    return corpus, totals


def augment_corpus(
    g: WeightedGraph,
    windows: Sequence[Window],
    low: float,
    high: float,
    workers: int = 1,
) -> Corpus:
    corpus, _ = augment_corpus_with_stats(g, windows, low, high, workers)
    return corpus
