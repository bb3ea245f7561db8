#!/usr/bin/env python3
"""
Prometheus metrics for argew-embed
"""

import logging
from prometheus_client import REGISTRY, Counter, Gauge, Histogram, Info, write_to_textfile

logger = logging.getLogger(__name__)

# Walk and corpus metrics
walks_sampled = Counter(
    "argew_walks_sampled_total",
    "Total number of random walks sampled",
    ["strategy"],
)

windows_emitted = Counter(
    "argew_windows_total",
    "Total number of corpus windows produced",
    ["source"],
)

substitutions = Counter(
    "argew_substitutions_total",
    "ARGEW substitution lookups by outcome",
    ["outcome"],
)

corpus_windows = Gauge(
    "argew_corpus_windows",
    "Windows in the most recent training corpus",
    ["kind"],
)

# Training metrics
training_epochs = Counter(
    "argew_training_epochs_total",
    "Total number of SGNS training epochs run",
)

training_epoch_loss = Gauge(
    "argew_training_epoch_loss",
    "Mean per-pair SGNS loss of the most recent epoch",
)

training_epoch_duration = Histogram(
    "argew_training_epoch_duration_seconds",
    "Time spent in one SGNS training epoch",
)

# Pipeline metrics
stage_duration = Histogram(
    "argew_stage_duration_seconds",
    "Time spent in a pipeline stage",
    ["stage"],
)

stage_errors = Counter(
    "argew_stage_errors_total",
    "Total number of pipeline stage failures",
    ["stage", "error_type"],
)

classification_micro_f1 = Gauge(
    "argew_classification_micro_f1",
    "Mean micro F1 of the most recent classification protocol",
    ["argew"],
)

classification_macro_f1 = Gauge(
    "argew_classification_macro_f1",
    "Mean macro F1 of the most recent classification protocol",
    ["argew"],
)

build_info = Info(
    "argew_build",
    "argew-embed build information",
)


def init_metrics():
    """Initialize build metrics"""
    build_info.info(
        {
            "version": "0.1.0",
            "name": "argew-embed",
            "description": "Random-walk node embeddings with ARGEW augmentation",
        }
    )
    logger.debug("Prometheus metrics initialized")


def record_walks(strategy: str, count: int):
    """Record sampled walks"""
    walks_sampled.labels(strategy=strategy).inc(count)


def record_windows(source: str, count: int):
    """Record windows produced by windowing or augmentation"""
    windows_emitted.labels(source=source).inc(count)


def record_augmentation(triggered: int, below_median: int, no_candidate: int):
    """Record ARGEW substitution outcomes"""
    substitutions.labels(outcome="triggered").inc(triggered)
    substitutions.labels(outcome="below_median").inc(below_median)
    substitutions.labels(outcome="none").inc(no_candidate)


def record_corpus(unique: int, total: int):
    """Record size of the training corpus"""
    corpus_windows.labels(kind="unique").set(unique)
    corpus_windows.labels(kind="total").set(total)


def record_training_epoch(loss: float, duration: float):
    """Record one finished training epoch"""
    training_epochs.inc()
    training_epoch_loss.set(loss)
    training_epoch_duration.observe(duration)


def record_stage_error(stage: str, error_type: str):
    """Record pipeline stage failure"""
    stage_errors.labels(stage=stage, error_type=error_type).inc()


def record_classification(use_argew: bool, micro_f1: float, macro_f1: float):
    """Record classification protocol result"""
    label = "on" if use_argew else "off"
    classification_micro_f1.labels(argew=label).set(micro_f1)
    classification_macro_f1.labels(argew=label).set(macro_f1)


def write_metrics(path: str) -> bool:
    """Write the registry in Prometheus text format; False when it cannot be written"""
    try:
        write_to_textfile(path, REGISTRY)
        logger.info(f"Wrote metrics to {path}")
        return True
    except OSError as e:
        logger.warning(f"Failed to write metrics file {path}: {e}")
        return False
