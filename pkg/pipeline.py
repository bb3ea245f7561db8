#!/usr/bin/env python3
"""
Pipeline orchestration: walk -> window -> (ARGEW) -> train -> evaluate,
plus the parameter sweep, p/q grid and rescale-range study harnesses.

Every stage draws from its own seed derived from one root seed, so
toggling ARGEW never perturbs walk sampling.
"""

import logging
import os
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields, replace
from typing import (
    Any,
    Dict,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
    get_args,
    get_origin,
    get_type_hints,
)

import yaml

from argew_augment import AugmentStats, Corpus, augment_corpus_with_stats
from errors import ConfigError, EmbeddingError, StageError
from eval_suite import (
    ClassificationReport,
    SimilarityBinReport,
    classification_protocol,
    similarity_by_weight_bin,
)
from formats import load_edge_list, load_labels, save_corpus, save_embeddings, write_table
from graph_core import WeightedGraph
from metrics import (
    record_augmentation,
    record_classification,
    record_corpus,
    record_stage_error,
    record_walks,
    record_windows,
    stage_duration,
)
from sgns_trainer import EmbeddingSet, SgnsConfig, TrainReport, train
from utils import calculate_file_hash, derive_seed, get_output_path
from walk_sampler import Window, WalkConfig, WalkStrategy, sample_walks, split_windows

logger = logging.getLogger(__name__)

SWEEP_PARAMETERS = ("p", "q", "dim", "context_size")
DEFAULT_PQ_VALUES = (0.25, 1.0, 4.0)
DEFAULT_HIGHS = (2.0, 3.0, 9.0)

CORPUS_FILE = "corpus.txt"
EMBEDDINGS_FILE = "embeddings.txt"
SIMILARITY_FILE = "similarity.tsv"
CLASSIFICATION_FILE = "classification.tsv"
MANIFEST_FILE = "run.yaml"

FAILED = "failed"


@dataclass
class PipelineConfig:
    # inputs and outputs
    edges: Optional[str] = None
    labels: Optional[str] = None
    output_dir: str = "output"

    # walks
    strategy: str = WalkStrategy.NODE2VEC.value
    p: float = 1.0
    q: float = 1.0
    walk_length: int = 80
    walks_per_node: int = 10
    argew_walks_per_node: int = 1
    context_size: int = 10

    # ARGEW
    use_argew: bool = False
    low: float = 1.0
    high: float = 9.0

    # SGNS
    dim: int = 128
    negatives_per_positive: int = 1
    learning_rate: float = 0.01
    max_epochs: int = 10
    batch_size: int = 1024
    argew_batch_size: int = 256

    # evaluation
    n_bins: int = 10
    nonedge_cap: int = 1_000_000
    l2_strength: float = 1.0
    splits: int = 10
    train_fraction: float = 0.5

    seed: Optional[int] = None
    workers: int = 1

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(
        cls, values: Mapping[str, Any], base: Optional["PipelineConfig"] = None
    ) -> "PipelineConfig":
        """Overlay values on base (or the defaults); unknown keys are errors"""
        hints = get_type_hints(cls)
        updates: Dict[str, Any] = {}
        for key, value in values.items():
            name = str(key).replace("-", "_")
            if name not in hints:
                raise ConfigError(f"unknown config key: {key!r}")
            updates[name] = _coerce(name, hints[name], value)
        return replace(base or cls(), **updates)

    def walk_config(self) -> WalkConfig:
        return WalkConfig(
            strategy=self.strategy,
            p=self.p,
            q=self.q,
            walk_length=self.walk_length,
            walks_per_node=self.argew_walks_per_node if self.use_argew else self.walks_per_node,
            context_size=self.context_size,
            seed=derive_seed(self.require_seed(), "walk"),
            workers=self.workers,
        )

    def sgns_config(self) -> SgnsConfig:
        return SgnsConfig(
            dim=self.dim,
            negatives_per_positive=self.negatives_per_positive,
            learning_rate=self.learning_rate,
            max_epochs=self.max_epochs,
            batch_size=self.argew_batch_size if self.use_argew else self.batch_size,
            seed=derive_seed(self.require_seed(), "train"),
        )

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is required for stochastic stages")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        return self.seed

    def validate(self):
        """Check every bound up front so a bad value fails before any work"""
        try:
            # both modes, so a sweep cannot hit a bad value halfway through
            for mode in (self, replace(self, use_argew=not self.use_argew)):
                mode.walk_config()
                mode.sgns_config()
        except ConfigError:
            raise
        except EmbeddingError as e:
            raise ConfigError(str(e))
        if not self.low <= self.high:
            raise ConfigError(f"low must be <= high, got low={self.low}, high={self.high}")
        if self.n_bins < 1:
            raise ConfigError(f"n_bins must be >= 1, got {self.n_bins}")
        if self.nonedge_cap < 0:
            raise ConfigError(f"nonedge_cap must be >= 0, got {self.nonedge_cap}")
        if self.l2_strength < 0:
            raise ConfigError(f"l2_strength must be >= 0, got {self.l2_strength}")
        if self.splits < 1:
            raise ConfigError(f"splits must be >= 1, got {self.splits}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def _coerce(name: str, hint: Any, value: Any) -> Any:
    if get_origin(hint) is Union:
        if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none", "null")):
            return None
        hint = next(arg for arg in get_args(hint) if arg is not type(None))

    try:
        if hint is bool:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("true", "yes", "on", "1"):
                return True
            if text in ("false", "no", "off", "0"):
                return False
            raise ValueError(value)
        if hint is int:
            if isinstance(value, bool) or isinstance(value, (list, tuple)):
                raise ValueError(value)
            if isinstance(value, float):
                if not value.is_integer():
                    raise ValueError(value)
                return int(value)
            text = str(value).strip()
            try:
                return int(text)
            except ValueError:
                number = float(text)
                if not number.is_integer():
                    raise
                return int(number)
        if hint is float:
            if isinstance(value, (bool, list, tuple)):
                raise ValueError(value)
            return float(value)
        if isinstance(value, (list, tuple, dict)):
            raise ValueError(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {name}: {value!r} (expected {hint.__name__})")


@dataclass
class PipelineResult:
    config: PipelineConfig
    corpus: Corpus
    embeddings: EmbeddingSet
    train_report: TrainReport
    similarity: SimilarityBinReport
    classification: Optional[ClassificationReport] = None
    augment_stats: Optional[AugmentStats] = None
    artifacts: Dict[str, str] = field(default_factory=dict)


@dataclass
class GraphInput:
    graph: WeightedGraph
    names: Optional[List[str]] = None
    labels: Optional[List[str]] = None


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Time a pipeline stage; domain errors leave it wrapped with the stage name"""
    logger.info(f"Stage {name}: started")
    start_time = time.time()
    try:
        yield
    except StageError:
        raise
    except EmbeddingError as e:
        logger.error(f"Stage {name} failed: {e}")
        record_stage_error(name, type(e).__name__)
        raise StageError(name, e) from e
    duration = time.time() - start_time
    stage_duration.labels(stage=name).observe(duration)
    logger.info(f"Stage {name}: finished in {duration:.2f}s")


def load_inputs(config: PipelineConfig) -> GraphInput:
    """Edge list and (optional) labels; labels are checked before any training"""
    if config.edges is None:
        raise ConfigError("no edge list given (edges)")
    with stage("load"):
        graph, id_map = load_edge_list(config.edges)
        labels = load_labels(config.labels, id_map) if config.labels is not None else None
    names = [""] * len(id_map)
    for name, node in id_map.items():
        names[node] = name
    return GraphInput(graph=graph, names=names, labels=labels)


def sample_windows(g: WeightedGraph, config: PipelineConfig) -> List[Window]:
    params = config.walk_config()
    with stage("walk"):
        walks = sample_walks(g, params)
        windows: List[Window] = [
            window for walk in walks for window in split_windows(walk, params.context_size)
        ]
        record_walks(params.strategy.value, len(walks))
        record_windows("walk", len(windows))
    return windows


def build_corpus(
    g: WeightedGraph, config: PipelineConfig
) -> Tuple[Corpus, Optional[AugmentStats]]:
    windows = sample_windows(g, config)
    stats: Optional[AugmentStats] = None
    if config.use_argew:
        with stage("augment"):
            corpus, stats = augment_corpus_with_stats(
                g, windows, config.low, config.high, workers=config.workers
            )
            record_windows("augment", corpus.total_windows() - len(windows))
            record_augmentation(stats.triggered, stats.below_median, stats.no_candidate)
    else:
        corpus = Corpus.from_windows(windows)

    record_corpus(len(corpus), corpus.total_windows())
    return corpus, stats


def run_pipeline(
    config: PipelineConfig,
    inputs: Optional[GraphInput] = None,
    write_artifacts: bool = True,
) -> PipelineResult:
    """
    Run the whole pipeline for one configuration.

    With write_artifacts, the corpus, embeddings, similarity and
    classification reports and a run.yaml manifest land in output_dir.
    """
    config.validate()
    seed = config.require_seed()
    if inputs is None:
        inputs = load_inputs(config)
    g = inputs.graph
    logger.info(f"Running pipeline on {g} (argew={config.use_argew}, seed={seed})")

    corpus, stats = build_corpus(g, config)

    with stage("train"):
        embeddings, report = train(corpus, g.node_count, config.context_size, config.sgns_config())

    with stage("eval-sim"):
        similarity = similarity_by_weight_bin(
            g, embeddings, config.n_bins, config.nonedge_cap, derive_seed(seed, "eval-sim")
        )

    classification = None
    if inputs.labels is not None:
        with stage("eval-clf"):
            classification = classification_protocol(
                embeddings,
                inputs.labels,
                derive_seed(seed, "eval-clf"),
                splits=config.splits,
                train_fraction=config.train_fraction,
                l2_strength=config.l2_strength,
            )
            record_classification(
                config.use_argew, classification.micro_f1, classification.macro_f1
            )

    result = PipelineResult(
        config=config,
        corpus=corpus,
        embeddings=embeddings,
        train_report=report,
        similarity=similarity,
        classification=classification,
        augment_stats=stats,
    )
    if write_artifacts:
        with stage("write"):
            result.artifacts = write_pipeline_artifacts(result, inputs.names)
    return result


SIMILARITY_HEADER = ("bin", "low", "high", "pairs", "median", "mean", "min", "max")
CLASSIFICATION_HEADER = ("split", "micro_f1", "macro_f1")


def similarity_rows(report: SimilarityBinReport) -> List[Tuple]:
    return [
        (index, b.low, b.high, b.pair_count, b.median, b.mean, b.min, b.max)
        for index, b in enumerate(report.bins)
    ]


def write_pipeline_artifacts(
    result: PipelineResult, names: Optional[Sequence[str]] = None
) -> Dict[str, str]:
    """Write every artifact plus the run.yaml manifest; returns name -> path"""
    out = result.config.output_dir
    paths = {
        "corpus": get_output_path(out, CORPUS_FILE),
        "embeddings": get_output_path(out, EMBEDDINGS_FILE),
        "similarity": get_output_path(out, SIMILARITY_FILE),
    }
    save_corpus(paths["corpus"], result.corpus)
    save_embeddings(paths["embeddings"], result.embeddings.embedding, names)
    write_table(paths["similarity"], SIMILARITY_HEADER, similarity_rows(result.similarity))
    if result.classification is not None:
        paths["classification"] = get_output_path(out, CLASSIFICATION_FILE)
        write_table(paths["classification"], CLASSIFICATION_HEADER, result.classification.rows())

    manifest = {
        "config": asdict(result.config),
        "training": {
            "epochs_run": result.train_report.epochs_run,
            "stopped_early": result.train_report.stopped_early,
            "losses": [float(loss) for loss in result.train_report.losses],
        },
        "corpus": {
            "unique_windows": len(result.corpus),
            "total_windows": result.corpus.total_windows(),
        },
        "artifacts": {
            name: {"file": os.path.basename(path), "sha256": calculate_file_hash(path)}
            for name, path in sorted(paths.items())
        },
    }
    paths["manifest"] = get_output_path(out, MANIFEST_FILE)
    with open(paths["manifest"], "w", encoding="utf-8") as f:
        yaml.safe_dump(manifest, f, sort_keys=True)
    return paths


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: Tuple[Any, ...]

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(
                f"unknown sweep parameter {self.parameter!r} (expected one of {', '.join(SWEEP_PARAMETERS)})"
            )
        if not self.values:
            raise ConfigError("a sweep needs at least one value")
        hint = get_type_hints(PipelineConfig)[self.parameter]
        values = tuple(_coerce(self.parameter, hint, v) for v in self.values)
        for value in values:
            if self.parameter in ("p", "q") and not value > 0:
                raise ConfigError(f"{self.parameter} must be positive, got {value}")
            if self.parameter == "dim" and value < 1:
                raise ConfigError(f"dim must be >= 1, got {value}")
            if self.parameter == "context_size" and value < 2:
                raise ConfigError(f"context_size must be >= 2, got {value}")
        object.__setattr__(self, "values", values)


@dataclass
class SweepResult:
    parameter: str
    rows: List[Tuple[Any, Union[float, str], Union[float, str]]]

    @property
    def header(self) -> Tuple[str, ...]:
        return (self.parameter, "micro_f1_baseline", "micro_f1_argew")

    @property
    def failed_cells(self) -> int:
        return sum(cell == FAILED for row in self.rows for cell in row[1:])


def _classification_cell(
    config: PipelineConfig, inputs: GraphInput, description: str
) -> Union[ClassificationReport, str]:
    try:
        result = run_pipeline(config, inputs, write_artifacts=False)
    except EmbeddingError as e:
        logger.warning(f"Cell {description} failed: {e}")
        record_stage_error("sweep", type(e).__name__)
        return FAILED
    return result.classification


def _micro(cell: Union[ClassificationReport, str]) -> Union[float, str]:
    return cell if isinstance(cell, str) else cell.micro_f1


def _labeled_inputs(config: PipelineConfig, inputs: Optional[GraphInput]) -> GraphInput:
    if inputs is None:
        if config.labels is None:
            raise ConfigError("classification needs a label file (labels)")
        inputs = load_inputs(config)
    if inputs.labels is None:
        raise ConfigError("classification needs node labels")
    return inputs


def run_sweep(
    spec: SweepSpec, config: PipelineConfig, inputs: Optional[GraphInput] = None
) -> SweepResult:
    """Micro F1 per swept value with ARGEW off and on; failed cells are marked"""
    config.require_seed()
    inputs = _labeled_inputs(config, inputs)

    rows = []
    for value in spec.values:
        cells = []
        for use_argew in (False, True):
            cell_config = replace(config, **{spec.parameter: value, "use_argew": use_argew})
            description = f"{spec.parameter}={value} argew={use_argew}"
            cells.append(_micro(_classification_cell(cell_config, inputs, description)))
        logger.info(f"Sweep {spec.parameter}={value}: baseline {cells[0]}, argew {cells[1]}")
        rows.append((value, cells[0], cells[1]))

    return SweepResult(parameter=spec.parameter, rows=rows)


@dataclass
class PqGridResult:
    rows: List[Tuple[float, float, Union[float, str], Union[float, str]]]
    best: Dict[bool, Optional[Tuple[float, float]]]

    header = ("p", "q", "micro_f1_baseline", "micro_f1_argew")


def run_pq_grid(
    config: PipelineConfig,
    values: Sequence[float] = DEFAULT_PQ_VALUES,
    inputs: Optional[GraphInput] = None,
) -> PqGridResult:
    """Every (p, q) pair with ARGEW off and on; best pair per mode by micro F1"""
    config.require_seed()
    inputs = _labeled_inputs(config, inputs)
    values = SweepSpec("p", tuple(values)).values

    rows = []
    best: Dict[bool, Optional[Tuple[float, float]]] = {False: None, True: None}
    best_score: Dict[bool, float] = {False: -1.0, True: -1.0}
    for p in values:
        for q in values:
            cells = []
            for use_argew in (False, True):
                cell_config = replace(config, p=p, q=q, use_argew=use_argew)
                micro = _micro(_classification_cell(cell_config, inputs, f"p={p} q={q} argew={use_argew}"))
                cells.append(micro)
                if not isinstance(micro, str) and micro > best_score[use_argew]:
                    best_score[use_argew] = micro
                    best[use_argew] = (p, q)
            rows.append((p, q, cells[0], cells[1]))

    logger.info(f"p/q grid: best baseline {best[False]}, best argew {best[True]}")
    return PqGridResult(rows=rows, best=best)


@dataclass
class RescaleStudyResult:
    highs: Tuple[float, ...]
    rows: List[Tuple]

    @property
    def header(self) -> Tuple[str, ...]:
        return ("low", "high") + tuple(f"median_high_{h!r}" for h in self.highs)


def run_rescale_study(
    config: PipelineConfig,
    highs: Sequence[float] = DEFAULT_HIGHS,
    inputs: Optional[GraphInput] = None,
) -> RescaleStudyResult:
    """
    ARGEW embeddings for each rescale upper bound; per edge-weight bin the
    median cosine similarity, one column per bound
    """
    config.require_seed()
    highs = tuple(_coerce("high", float, h) for h in highs)
    if not highs:
        raise ConfigError("the rescale study needs at least one high value")
    for high in highs:
        if not high >= config.low:
            raise ConfigError(f"high must be >= low={config.low}, got {high}")
    if inputs is None:
        inputs = load_inputs(replace(config, labels=None))
    unlabeled = GraphInput(graph=inputs.graph, names=inputs.names)

    columns = []
    bins = None
    for high in highs:
        result = run_pipeline(
            replace(config, use_argew=True, high=high), unlabeled, write_artifacts=False
        )
        bins = result.similarity.edge_bins
        columns.append([b.median for b in bins])
        logger.info(f"Rescale study high={high}: medians {columns[-1]}")

    rows = [
        (b.low, b.high, *[column[index] for column in columns])
        for index, b in enumerate(bins)
    ]
    return RescaleStudyResult(highs=highs, rows=rows)
