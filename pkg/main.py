#!/usr/bin/env python3
"""
argew-embed command line: walk, augment, train and evaluate node
embeddings, plus the synthetic benchmarks and sweep harnesses
"""

import argparse
import logging
import os
import sys
from dataclasses import fields, replace
from typing import Callable, Dict, List, Optional, Sequence

from argew_augment import Corpus, augment_corpus_with_stats
from errors import ConfigError, EmbeddingError, FormatError
from eval_suite import classification_protocol, similarity_by_weight_bin
from formats import (
    align_embeddings,
    load_corpus,
    load_embeddings,
    save_corpus,
    save_edge_list,
    save_embeddings,
    save_labels,
    write_table,
)
from metrics import init_metrics, record_augmentation, record_classification, write_metrics
from pipeline import (
    CLASSIFICATION_HEADER,
    SIMILARITY_HEADER,
    GraphInput,
    PipelineConfig,
    SweepSpec,
    load_inputs,
    run_pipeline,
    run_pq_grid,
    run_rescale_study,
    run_sweep,
    sample_windows,
    similarity_rows,
    stage,
)
from sgns_trainer import train
from synth_roles import (
    COMMUNITIES,
    build_roles_graph,
    build_two_cliques,
    coappearance_differences,
    roles_labels,
    run_coappearance_experiment,
    two_cliques_labels,
)
from utils import derive_seed, load_config_file, parse_value

logger = logging.getLogger(__name__)

WALK_FIELDS = [
    "strategy", "p", "q", "walk_length", "walks_per_node", "argew_walks_per_node",
    "use_argew", "context_size",
]
TRAIN_FIELDS = [
    "dim", "negatives_per_positive", "learning_rate", "max_epochs", "batch_size",
    "argew_batch_size", "use_argew", "context_size",
]
ALL_FIELDS = PipelineConfig.field_names()

# subcommand -> PipelineConfig fields exposed as flags
COMMAND_FIELDS: Dict[str, List[str]] = {
    "walk": ["edges", "seed", "workers"] + WALK_FIELDS,
    "augment": ["edges", "low", "high", "workers"],
    "train": ["edges", "seed"] + TRAIN_FIELDS,
    "eval-sim": ["edges", "seed", "n_bins", "nonedge_cap"],
    "eval-clf": ["edges", "labels", "seed", "use_argew", "splits", "train_fraction", "l2_strength"],
    "coappear": ["seed", "strategy", "p", "q", "use_argew"],
    "synth": [],
    "sweep": ALL_FIELDS,
    "pipeline": ALL_FIELDS,
    "pq-grid": ALL_FIELDS,
    "rescale-study": ALL_FIELDS,
}

STOCHASTIC_COMMANDS = {
    "walk", "train", "eval-sim", "eval-clf", "coappear", "sweep", "pipeline", "pq-grid",
    "rescale-study",
}


def _add_config_flags(parser: argparse.ArgumentParser, names: Sequence[str]):
    """One flag per config field; unset flags stay absent so file values win"""
    defaults = PipelineConfig()
    for f in fields(PipelineConfig):
        if f.name not in names:
            continue
        flag = "--" + f.name.replace("_", "-")
        default = getattr(defaults, f.name)
        if f.type is bool:
            parser.add_argument(
                flag,
                dest=f.name,
                action=argparse.BooleanOptionalAction,
                default=argparse.SUPPRESS,
                help=f"(default: {default})",
            )
        else:
            parser.add_argument(
                flag, dest=f.name, default=argparse.SUPPRESS, help=f"(default: {default})"
            )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value or .yaml config file")
    common.add_argument(
        "--log-level",
        default=os.environ.get("LOG_LEVEL", "INFO"),
        help="logging level (default: $LOG_LEVEL or INFO)",
    )
    common.add_argument("--metrics-file", help="write Prometheus metrics to this file")

    parser = argparse.ArgumentParser(
        prog="argew-embed",
        description="Random-walk node embeddings with ARGEW window augmentation",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    walk = commands.add_parser("walk", parents=[common], help="sample walks into a window corpus")
    walk.add_argument("--output", required=True, help="corpus file to write")

    augment = commands.add_parser("augment", parents=[common], help="apply ARGEW to a corpus")
    augment.add_argument("--corpus", required=True, help="input corpus file")
    augment.add_argument("--output", required=True, help="augmented corpus file to write")

    train_cmd = commands.add_parser("train", parents=[common], help="train SGNS embeddings")
    train_cmd.add_argument("--corpus", required=True, help="input corpus file")
    train_cmd.add_argument("--output", required=True, help="embedding file to write")

    for name, help_text in (
        ("eval-sim", "cosine similarity by edge-weight bin"),
        ("eval-clf", "node classification micro/macro F1"),
    ):
        evaluate = commands.add_parser(name, parents=[common], help=help_text)
        evaluate.add_argument("--embeddings", required=True, help="embedding file")
        evaluate.add_argument("--output", default="-", help="report file (default: stdout)")

    coappear = commands.add_parser(
        "coappear", parents=[common], help="coappearance table on the roles graph"
    )
    coappear.add_argument("--output", default="-", help="table file (default: stdout)")

    synth = commands.add_parser("synth", parents=[common], help="write a synthetic graph")
    synth.add_argument("--kind", choices=("roles", "cliques"), default="roles")
    synth.add_argument("--clique-size", type=int, default=8)
    synth.add_argument("--output", required=True, help="edge list file to write")
    synth.add_argument("--labels-output", help="label file to write")

    sweep = commands.add_parser("sweep", parents=[common], help="one-parameter sensitivity sweep")
    sweep.add_argument("--parameter", required=True, help="p, q, dim or context_size")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--output", default="-", help="table file (default: stdout)")

    commands.add_parser("pipeline", parents=[common], help="walk, augment, train and evaluate")

    grid = commands.add_parser("pq-grid", parents=[common], help="micro F1 over a p/q grid")
    grid.add_argument("--values", default="0.25,1,4", help="comma-separated p and q values")
    grid.add_argument("--output", default="-", help="table file (default: stdout)")

    study = commands.add_parser(
        "rescale-study", parents=[common], help="similarity medians per rescale upper bound"
    )
    study.add_argument("--highs", default="2,3,9", help="comma-separated high values")
    study.add_argument("--output", default="-", help="table file (default: stdout)")

    for name, subparser in commands.choices.items():
        _add_config_flags(subparser, COMMAND_FIELDS[name])

    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Defaults < config file < explicit flags"""
    values = load_config_file(args.config) if args.config else {}
    flags = {name: getattr(args, name) for name in ALL_FIELDS if hasattr(args, name)}
    values.update(flags)
    return PipelineConfig.from_mapping(values)


def _id_map(inputs: GraphInput) -> Dict[str, int]:
    return {name: node for node, name in enumerate(inputs.names)}


def _aligned_embeddings(path: str, inputs: GraphInput):
    vectors, names = load_embeddings(path)
    return align_embeddings(vectors, names, _id_map(inputs))


def _check_corpus_nodes(corpus: Corpus, node_count: int, path: str):
    for window, _ in corpus:
        if max(window) >= node_count:
            raise FormatError(
                f"node {max(window)} is outside the graph (0..{node_count - 1})", path
            )


def cmd_walk(args, config: PipelineConfig):
    inputs = load_inputs(replace(config, labels=None))
    windows = sample_windows(inputs.graph, config)
    save_corpus(args.output, Corpus.from_windows(windows))


def cmd_augment(args, config: PipelineConfig):
    inputs = load_inputs(replace(config, labels=None))
    corpus = load_corpus(args.corpus)
    _check_corpus_nodes(corpus, inputs.graph.node_count, args.corpus)
    with stage("augment"):
        augmented, stats = augment_corpus_with_stats(
            inputs.graph, list(corpus.expand()), config.low, config.high, workers=config.workers
        )
        record_augmentation(stats.triggered, stats.below_median, stats.no_candidate)
    save_corpus(args.output, augmented)


def cmd_train(args, config: PipelineConfig):
    inputs = load_inputs(replace(config, labels=None))
    corpus = load_corpus(args.corpus)
    _check_corpus_nodes(corpus, inputs.graph.node_count, args.corpus)
    with stage("train"):
        embeddings, _ = train(
            corpus, inputs.graph.node_count, config.context_size, config.sgns_config()
        )
    save_embeddings(args.output, embeddings.embedding, inputs.names)


def cmd_eval_sim(args, config: PipelineConfig):
    inputs = load_inputs(replace(config, labels=None))
    vectors = _aligned_embeddings(args.embeddings, inputs)
    with stage("eval-sim"):
        report = similarity_by_weight_bin(
            inputs.graph,
            vectors,
            config.n_bins,
            config.nonedge_cap,
            derive_seed(config.require_seed(), "eval-sim"),
        )
    write_table(args.output, SIMILARITY_HEADER, similarity_rows(report))


def cmd_eval_clf(args, config: PipelineConfig):
    if config.labels is None:
        raise ConfigError("eval-clf needs a label file (--labels)")
    inputs = load_inputs(config)
    vectors = _aligned_embeddings(args.embeddings, inputs)
    with stage("eval-clf"):
        report = classification_protocol(
            vectors,
            inputs.labels,
            derive_seed(config.require_seed(), "eval-clf"),
            splits=config.splits,
            train_fraction=config.train_fraction,
            l2_strength=config.l2_strength,
        )
        record_classification(config.use_argew, report.micro_f1, report.macro_f1)
    write_table(args.output, CLASSIFICATION_HEADER, report.rows())


def cmd_coappear(args, config: PipelineConfig):
    table = run_coappearance_experiment(
        config.use_argew, config.p, config.q, config.require_seed(), strategy=config.strategy
    )
    write_table(args.output, ("type", *table.types), table.table_rows())
    for community in COMMUNITIES:
        internal_diff, etc_diff = coappearance_differences(table, community)
        print(f"c{community}\tinternal_diff\t{internal_diff!r}\tetc_diff\t{etc_diff!r}")


def cmd_synth(args, config: PipelineConfig):
    if args.kind == "roles":
        g, labels = build_roles_graph(), roles_labels()
    else:
        g = build_two_cliques(args.clique_size)
        labels = two_cliques_labels(args.clique_size)
    save_edge_list(args.output, g)
    if args.labels_output:
        save_labels(args.labels_output, labels)


def cmd_sweep(args, config: PipelineConfig):
    spec = SweepSpec(args.parameter.replace("-", "_"), tuple(parse_value("sweep_values", args.values)))
    result = run_sweep(spec, config)
    write_table(args.output, result.header, result.rows)
    if result.failed_cells:
        logger.warning(f"Sweep finished with {result.failed_cells} failed cells")


def cmd_pipeline(args, config: PipelineConfig):
    result = run_pipeline(config)
    logger.info(f"Pipeline artifacts: {', '.join(sorted(result.artifacts.values()))}")


def cmd_pq_grid(args, config: PipelineConfig):
    result = run_pq_grid(config, parse_value("pq_values", args.values))
    write_table(args.output, result.header, result.rows)
    for use_argew, best in result.best.items():
        mode = "argew" if use_argew else "baseline"
        logger.info(f"Best {mode} (p, q): {best}")


def cmd_rescale_study(args, config: PipelineConfig):
    result = run_rescale_study(config, parse_value("highs", args.highs))
    write_table(args.output, result.header, result.rows)


COMMANDS: Dict[str, Callable[[argparse.Namespace, PipelineConfig], None]] = {
    "walk": cmd_walk,
    "augment": cmd_augment,
    "train": cmd_train,
    "eval-sim": cmd_eval_sim,
    "eval-clf": cmd_eval_clf,
    "coappear": cmd_coappear,
    "synth": cmd_synth,
    "sweep": cmd_sweep,
    "pipeline": cmd_pipeline,
    "pq-grid": cmd_pq_grid,
    "rescale-study": cmd_rescale_study,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = getattr(logging, str(args.log_level).upper(), None)
    if not isinstance(level, int):
        parser.error(f"unknown log level: {args.log_level}")
    logging.basicConfig(level=level)
    init_metrics()

    try:
        config = resolve_config(args)
        if args.command in STOCHASTIC_COMMANDS and config.seed is None:
            parser.error(f"{args.command}: --seed is required")
        COMMANDS[args.command](args, config)
        return 0
    except EmbeddingError as e:
        print(f"argew-embed {args.command}: error: {e}", file=sys.stderr)
        return 1
    finally:
        if args.metrics_file:
            write_metrics(args.metrics_file)


if __name__ == "__main__":
    sys.exit(main())
