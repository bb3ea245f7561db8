#!/usr/bin/env python3
"""
Skip-gram with negative sampling over a window corpus.

Center and context matrices are trained with plain minibatch SGD at a
fixed learning rate; gradients are derived by hand and averaged within
a batch. Training stops after the first epoch whose mean per-pair loss
is not smaller than the previous epoch's.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.special import expit, log_expit

from argew_augment import Corpus
from errors import TrainingError
from metrics import record_training_epoch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SgnsConfig:
    dim: int = 128
    negatives_per_positive: int = 1
    learning_rate: float = 0.01
    max_epochs: int = 10
    batch_size: int = 1024
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise TrainingError(f"dim must be >= 1, got {self.dim}")
        if self.negatives_per_positive < 1:
            raise TrainingError(
                f"negatives_per_positive must be >= 1, got {self.negatives_per_positive}"
            )
        if not self.learning_rate > 0:
            raise TrainingError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise TrainingError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.batch_size < 1:
            raise TrainingError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0 <= self.seed < 2**64:
            raise TrainingError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass
class EmbeddingSet:
    center: np.ndarray
    context: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.center.shape[0])

    @property
    def dim(self) -> int:
        return int(self.center.shape[1])

    @property
    def embedding(self) -> np.ndarray:
        """Final node embeddings: the center matrix"""
        return self.center

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.center).all() and np.isfinite(self.context).all())


@dataclass
class TrainReport:
    losses: List[float] = field(default_factory=list)
    epochs_run: int = 0
    stopped_early: bool = False


class PairLoss(NamedTuple):
    loss: float
    grad_center: np.ndarray
    grad_context: np.ndarray
    grad_negatives: np.ndarray


def init_embeddings(n: int, config: SgnsConfig) -> EmbeddingSet:
    """Center uniform in [-0.5/d, 0.5/d] from the seeded stream, context zero"""
    if n < 1:
        raise TrainingError(f"need at least one node to embed, got {n}")
    rng = np.random.default_rng([config.seed, 0])
    bound = 0.5 / config.dim
    center = rng.uniform(-bound, bound, size=(n, config.dim))
    context = np.zeros((n, config.dim), dtype=np.float64)
    return EmbeddingSet(center=center, context=context)


def batch_loss_and_gradients(
    centers: np.ndarray, contexts: np.ndarray, negatives: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Per-pair SGNS loss and its gradients for a batch.

    centers, contexts: (B, d); negatives: (B, k, d). Returns loss (B,),
    d/dcenter (B, d), d/dcontext (B, d), d/dnegatives (B, k, d).
    """
    positive_score = np.einsum("bd,bd->b", centers, contexts)
    negative_score = np.einsum("bd,bkd->bk", centers, negatives)

    loss = -log_expit(positive_score) - log_expit(-negative_score).sum(axis=1)

    positive_coef = -expit(-positive_score)
    negative_coef = expit(negative_score)

    grad_center = positive_coef[:, None] * contexts + np.einsum(
        "bk,bkd->bd", negative_coef, negatives
    )
    grad_context = positive_coef[:, None] * centers
    grad_negatives = negative_coef[:, :, None] * centers[:, None, :]
    return loss, grad_center, grad_context, grad_negatives


def pair_loss(
    center_vec: Sequence[float],
    context_vec: Sequence[float],
    negative_vecs: Sequence[Sequence[float]],
) -> PairLoss:
    """-log σ(c·u) - Σ log σ(-c·u_neg) with exact gradients for every input"""
    center = np.asarray(center_vec, dtype=np.float64)
    context = np.asarray(context_vec, dtype=np.float64)
    negatives = np.asarray(negative_vecs, dtype=np.float64)
    dim = center.shape[0] if center.ndim == 1 else -1
    if negatives.size == 0:
        negatives = np.zeros((0, max(dim, 0)))
    if (
        center.ndim != 1
        or context.shape != center.shape
        or negatives.ndim != 2
        or negatives.shape[1] != dim
    ):
        raise TrainingError(
            f"dimension mismatch: center {center.shape}, context {context.shape}, "
            f"negatives {negatives.shape}"
        )

    loss, grad_center, grad_context, grad_negatives = batch_loss_and_gradients(
        center[None, :], context[None, :], negatives[None, :, :]
    )
    return PairLoss(float(loss[0]), grad_center[0], grad_context[0], grad_negatives[0])


def sample_negatives(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k node ids drawn uniformly with replacement from 0..n-1"""
    if n < 1:
        raise TrainingError(f"need at least one node to sample negatives, got {n}")
    return rng.integers(0, n, size=k)


def _expand_pairs(corpus: Corpus, context_size: int) -> Tuple[np.ndarray, np.ndarray]:
    centers: List[int] = []
    contexts: List[int] = []
    repeats: List[int] = []
    for window, count in corpus:
        if len(window) > context_size:
            raise TrainingError(
                f"window of length {len(window)} exceeds context size {context_size}"
            )
        center = window[0]
        for context in window[1:]:
            centers.append(center)
            contexts.append(context)
            repeats.append(count)
    counts = np.asarray(repeats, dtype=np.int64)
    return (
        np.repeat(np.asarray(centers, dtype=np.int64), counts),
        np.repeat(np.asarray(contexts, dtype=np.int64), counts),
    )


def _run_epoch(
    emb: EmbeddingSet,
    centers: np.ndarray,
    contexts: np.ndarray,
    config: SgnsConfig,
    rng: np.random.Generator,
) -> float:
    pair_total = centers.shape[0]
    order = rng.permutation(pair_total)
    negatives = sample_negatives(
        emb.node_count, pair_total * config.negatives_per_positive, rng
    ).reshape(pair_total, config.negatives_per_positive)

    total_loss = 0.0
    for start in range(0, pair_total, config.batch_size):
        batch = order[start : start + config.batch_size]
        c_ids = centers[batch]
        u_ids = contexts[batch]
        n_ids = negatives[batch]

        loss, grad_c, grad_u, grad_n = batch_loss_and_gradients(
            emb.center[c_ids], emb.context[u_ids], emb.context[n_ids]
        )
        total_loss += float(loss.sum())

        step = config.learning_rate / batch.shape[0]
        np.add.at(emb.center, c_ids, -step * grad_c)
        np.add.at(emb.context, u_ids, -step * grad_u)
        np.add.at(emb.context, n_ids.ravel(), -step * grad_n.reshape(-1, emb.dim))

    return total_loss / pair_total


def train(
    corpus: Corpus, n: int, context_size: int, config: SgnsConfig
) -> Tuple[EmbeddingSet, TrainReport]:
    if len(corpus) == 0:
        raise TrainingError("cannot train on an empty corpus")
    for window, _ in corpus:
        if max(window) >= n:
            raise TrainingError(f"corpus node {max(window)} outside 0..{n - 1}")

    centers, contexts = _expand_pairs(corpus, context_size)
    emb = init_embeddings(n, config)
    report = TrainReport()
    logger.info(
        f"Training SGNS: {n} nodes, dim {config.dim}, {centers.shape[0]} pairs per epoch, "
        f"batch {config.batch_size}, lr {config.learning_rate}"
    )

    for epoch in range(config.max_epochs):
        started = time.time()
        rng = np.random.default_rng([config.seed, 1, epoch])
        mean_loss = _run_epoch(emb, centers, contexts, config, rng)

        if not np.isfinite(mean_loss) or not emb.is_finite():
            raise TrainingError(f"non-finite loss or parameters after epoch {epoch + 1}")

        duration = time.time() - started
        record_training_epoch(mean_loss, duration)
        logger.info(f"Epoch {epoch + 1}/{config.max_epochs}: mean loss {mean_loss:.6f}")

        previous = report.losses[-1] if report.losses else None
        report.losses.append(mean_loss)
        report.epochs_run = epoch + 1
        if previous is not None and mean_loss >= previous:
            report.stopped_early = True
            logger.info(f"Early stopping after epoch {epoch + 1}: loss did not decrease")
            break

    return emb, report
