#!/usr/bin/env python3
"""
Embedding evaluation: cosine similarity by edge-weight bin, one-vs-rest
logistic regression with micro/macro F1 over stratified splits, and
coappearance distributions of walk windows
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit
from sklearn.metrics import f1_score

from argew_augment import Corpus
from errors import EvaluationError
from graph_core import WeightedGraph
from sgns_trainer import EmbeddingSet
from utils import derive_seed

logger = logging.getLogger(__name__)

DEFAULT_SPLITS = 10
DEFAULT_TRAIN_FRACTION = 0.5
DEFAULT_L2_STRENGTH = 1.0
DEFAULT_ITERATIONS = 500
DEFAULT_STEP = 0.1
DEFAULT_NONEDGE_CAP = 1_000_000


@dataclass(frozen=True)
class SimilarityBin:
    low: float
    high: float
    pair_count: int
    median: Optional[float]
    mean: Optional[float]
    min: Optional[float]
    max: Optional[float]

    @property
    def label(self) -> str:
        if self.high == 0.0:
            return "0"
        return f"({self.low!r}, {self.high!r}]"


@dataclass
class SimilarityBinReport:
    """Bin 0 holds non-edge pairs; bins 1.. partition (0, max_weight]"""

    bins: List[SimilarityBin]

    @property
    def nonedge(self) -> SimilarityBin:
        return self.bins[0]

    @property
    def edge_bins(self) -> List[SimilarityBin]:
        return self.bins[1:]

    def medians(self) -> List[Optional[float]]:
        return [b.median for b in self.bins]

    def rows(self) -> List[Tuple]:
        return [(b.low, b.high, b.pair_count, b.median, b.mean) for b in self.bins]


@dataclass
class ClassificationReport:
    micro_f1: float
    macro_f1: float
    split_scores: List[Tuple[float, float]] = field(default_factory=list)

    def rows(self) -> List[Tuple]:
        rows = [(str(i), micro, macro) for i, (micro, macro) in enumerate(self.split_scores)]
        rows.append(("mean", self.micro_f1, self.macro_f1))
        return rows


@dataclass
class CoappearanceTable:
    """Row type -> proportion of each coappearing node type"""

    types: List[str]
    rows: Dict[str, Dict[str, float]]

    def proportion(self, row_type: str, column_type: str) -> float:
        return self.rows[row_type][column_type]

    def table_rows(self) -> List[Tuple]:
        return [
            (row_type, *[self.rows[row_type][col] for col in self.types])
            for row_type in self.types
            if row_type in self.rows
        ]


def _vectors(emb: Union[EmbeddingSet, np.ndarray]) -> np.ndarray:
    if isinstance(emb, EmbeddingSet):
        return emb.embedding
    return np.asarray(emb, dtype=np.float64)


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise EvaluationError(f"vector shapes differ: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise EvaluationError("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (norm_a * norm_b), -1.0, 1.0))


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    if (norms == 0.0).any():
        node = int(np.argmax(norms == 0.0))
        raise EvaluationError(f"embedding of node {node} is a zero vector")
    return vectors / norms[:, None]


def _pair_cosines(unit: np.ndarray, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    return np.clip(np.einsum("ij,ij->i", unit[us], unit[vs]), -1.0, 1.0)


def sample_nonedges(
    g: WeightedGraph, cap: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Non-edge pairs (u < v): all of them under the cap, else a uniform sample"""
    n = g.node_count
    total = n * (n - 1) // 2 - g.edge_count
    if total <= cap:
        us, vs = np.triu_indices(n, k=1)
        dense = g.adjacency.toarray() > 0
        keep = ~dense[us, vs]
        return us[keep], vs[keep]

    chosen = set()
    while len(chosen) < cap:
        draws = rng.integers(0, n, size=(2 * (cap - len(chosen)) + 16, 2))
        for u, v in draws:
            if u == v:
                continue
            pair = (int(u), int(v)) if u < v else (int(v), int(u))
            if pair in chosen or g.has_edge(*pair):
                continue
            chosen.add(pair)
            if len(chosen) == cap:
                break
    pairs = np.array(sorted(chosen), dtype=np.int64).reshape(-1, 2)
    return pairs[:, 0], pairs[:, 1]


def _summarize(low: float, high: float, values: np.ndarray) -> SimilarityBin:
    if values.size == 0:
        return SimilarityBin(low, high, 0, None, None, None, None)
    return SimilarityBin(
        low,
        high,
        int(values.size),
        float(np.median(values)),
        float(np.mean(values)),
        float(values.min()),
        float(values.max()),
    )


def similarity_by_weight_bin(
    g: WeightedGraph,
    emb: Union[EmbeddingSet, np.ndarray],
    n_bins: int,
    nonedge_cap: int = DEFAULT_NONEDGE_CAP,
    seed: int = 0,
) -> SimilarityBinReport:
    """
    Median and mean cosine similarity per equal-width, right-closed
    weight bin over (0, max_weight], plus bin 0 for non-edge pairs.
    """
    if n_bins < 1:
        raise EvaluationError(f"n_bins must be >= 1, got {n_bins}")
    if g.edge_count == 0:
        raise EvaluationError("similarity bins need a graph with at least one edge")
    vectors = _vectors(emb)
    if vectors.shape[0] != g.node_count:
        raise EvaluationError(
            f"embeddings cover {vectors.shape[0]} nodes but the graph has {g.node_count}"
        )
    unit = _unit_rows(vectors)

    us, vs, ws = g.edges()
    boundaries = np.linspace(0.0, float(ws.max()), n_bins + 1)
    bin_of_edge = np.clip(np.searchsorted(boundaries, ws, side="left") - 1, 0, n_bins - 1)
    edge_cos = _pair_cosines(unit, us, vs)

    rng = np.random.default_rng(seed)
    non_us, non_vs = sample_nonedges(g, nonedge_cap, rng)
    bins = [_summarize(0.0, 0.0, _pair_cosines(unit, non_us, non_vs))]
    for index in range(n_bins):
        bins.append(
            _summarize(
                float(boundaries[index]),
                float(boundaries[index + 1]),
                edge_cos[bin_of_edge == index],
            )
        )

    logger.info(
        f"Similarity report: {g.edge_count} edges in {n_bins} bins, "
        f"{bins[0].pair_count} non-edge pairs"
    )
    return SimilarityBinReport(bins)


def stratified_split(
    labels: Sequence, train_fraction: float, seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-category seeded shuffle; round(size * fraction) of each goes to train"""
    if not 0.0 < train_fraction < 1.0:
        raise EvaluationError(f"train_fraction must be in (0, 1), got {train_fraction}")
    labels = np.asarray(labels)
    categories, counts = np.unique(labels, return_counts=True)
    if (counts < 2).any():
        lonely = categories[counts < 2][0]
        raise EvaluationError(f"category {lonely!r} has a single member, cannot stratify")

    rng = np.random.default_rng(seed)
    train: List[np.ndarray] = []
    test: List[np.ndarray] = []
    for category in categories:
        members = rng.permutation(np.flatnonzero(labels == category))
        take = min(max(round(members.size * train_fraction), 1), members.size - 1)
        train.append(members[:take])
        test.append(members[take:])

    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


class OvrLogisticRegression:
    """
    One-vs-rest logistic regression fitted by full-batch gradient descent.

    Each binary model minimises mean log loss plus
    l2_strength / (2 n) * ||w||^2; the L2 term is applied as a proximal
    step so large strengths stay stable. Weights start at zero.
    """

    def __init__(
        self,
        l2_strength: float = DEFAULT_L2_STRENGTH,
        iterations: int = DEFAULT_ITERATIONS,
        step: float = DEFAULT_STEP,
    ):
        if l2_strength < 0:
            raise EvaluationError(f"l2_strength must be >= 0, got {l2_strength}")
        self.l2_strength = l2_strength
        self.iterations = iterations
        self.step = step
        self.classes_: np.ndarray = np.zeros(0)
        self.weights_: np.ndarray = np.zeros((0, 0))
        self.bias_: np.ndarray = np.zeros(0)

    def fit(self, features: np.ndarray, labels: Sequence) -> "OvrLogisticRegression":
        X = np.asarray(features, dtype=np.float64)
        y = np.asarray(labels)
        self.classes_ = np.unique(y)
        if self.classes_.size < 2:
            raise EvaluationError("need at least 2 categories in the training data")

        n, d = X.shape
        targets = (y[None, :] == self.classes_[:, None]).astype(np.float64)
        weights = np.zeros((self.classes_.size, d))
        bias = np.zeros(self.classes_.size)
        shrink = 1.0 + self.step * self.l2_strength / n

        for _ in range(self.iterations):
            residual = expit(weights @ X.T + bias[:, None]) - targets
            weights = (weights - self.step * (residual @ X) / n) / shrink
            bias = bias - self.step * residual.mean(axis=1)

        self.weights_ = weights
        self.bias_ = bias
        return self

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        return np.asarray(features, dtype=np.float64) @ self.weights_.T + self.bias_

    def predict(self, features: np.ndarray) -> np.ndarray:
        # argmax returns the first maximum, so ties go to the smallest category
        return self.classes_[np.argmax(self.decision_function(features), axis=1)]


def train_ovr_logreg(
    features: np.ndarray,
    labels: Sequence,
    train_ids: Sequence[int],
    l2_strength: float = DEFAULT_L2_STRENGTH,
    iterations: int = DEFAULT_ITERATIONS,
    step: float = DEFAULT_STEP,
) -> OvrLogisticRegression:
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    ids = np.asarray(train_ids, dtype=np.int64)
    return OvrLogisticRegression(l2_strength, iterations, step).fit(X[ids], y[ids])


def f1_scores(true_labels: Sequence, predicted_labels: Sequence) -> Tuple[float, float]:
    """(micro F1, macro F1); a category with precision + recall = 0 scores 0"""
    if len(true_labels) != len(predicted_labels):
        raise EvaluationError(
            f"label lengths differ: {len(true_labels)} true vs {len(predicted_labels)} predicted"
        )
    if len(true_labels) == 0:
        raise EvaluationError("F1 needs at least one labeled item")
    y_true = np.asarray(true_labels)
    y_pred = np.asarray(predicted_labels)
    micro = f1_score(y_true, y_pred, average="micro", zero_division=0)
    macro = f1_score(y_true, y_pred, average="macro", zero_division=0)
    return float(micro), float(macro)


def classification_protocol(
    emb: Union[EmbeddingSet, np.ndarray],
    labels: Sequence,
    seed: int,
    splits: int = DEFAULT_SPLITS,
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
    l2_strength: float = DEFAULT_L2_STRENGTH,
) -> ClassificationReport:
    """Mean test micro/macro F1 over seeded stratified splits"""
    features = _vectors(emb)
    y = np.asarray(labels)
    if y.shape[0] != features.shape[0]:
        raise EvaluationError(
            f"{y.shape[0]} labels for {features.shape[0]} embedded nodes"
        )
    if np.unique(y).size < 2:
        raise EvaluationError("classification needs at least 2 categories")

    scores: List[Tuple[float, float]] = []
    for split in range(splits):
        train_ids, test_ids = stratified_split(y, train_fraction, derive_seed(seed, f"split-{split}"))
        model = train_ovr_logreg(features, y, train_ids, l2_strength)
        scores.append(f1_scores(y[test_ids], model.predict(features[test_ids])))
        logger.debug(f"Split {split}: micro {scores[-1][0]:.4f}, macro {scores[-1][1]:.4f}")

    micro = float(np.mean([s[0] for s in scores]))
    macro = float(np.mean([s[1] for s in scores]))
    logger.info(f"Classification over {splits} splits: micro F1 {micro:.4f}, macro F1 {macro:.4f}")
    return ClassificationReport(micro, macro, scores)


def _weighted_windows(
    windows: Union[Corpus, Iterable[Sequence[int]]]
) -> Iterable[Tuple[Sequence[int], int]]:
    if isinstance(windows, Corpus):
        return iter(windows)
    return ((window, 1) for window in windows)


def coappearance_distribution(
    windows: Union[Corpus, Iterable[Sequence[int]]],
    node_type_of: Union[Mapping[int, str], Callable[[int], str]],
    types: Optional[Sequence[str]] = None,
) -> CoappearanceTable:
    """
    For windows whose first node has type T, the proportion of each node
    type among the nodes at positions >= 1 (weighted by window count).
    """
    type_of = node_type_of if callable(node_type_of) else node_type_of.__getitem__
    counts: Dict[str, Dict[str, int]] = {}
    seen_types: List[str] = list(types) if types is not None else []
    empty = True

    for window, count in _weighted_windows(windows):
        empty = False
        window_types = [str(type_of(v)) for v in window]
        for t in window_types:
            if t not in seen_types:
                seen_types.append(t)
        row = counts.setdefault(window_types[0], {})
        for t in window_types[1:]:
            row[t] = row.get(t, 0) + count

    if empty:
        raise EvaluationError("coappearance needs at least one window")

    column_types = seen_types if types is not None else sorted(seen_types)
    rows: Dict[str, Dict[str, float]] = {}
    for row_type, row_counts in counts.items():
        total = sum(row_counts.values())
        if total == 0:
            continue
        rows[row_type] = {t: row_counts.get(t, 0) / total for t in column_types}

    return CoappearanceTable(types=column_types, rows=rows)
