#!/usr/bin/env python3
"""
File formats: weighted edge lists, node labels, window corpora,
embeddings and tab-separated reports
"""

import csv
import logging
import sys
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from argew_augment import Corpus
from errors import FormatError, GraphError
from graph_core import WeightedGraph, build_graph

logger = logging.getLogger(__name__)

IdMap = Dict[str, int]


def _open_lines(path: str) -> List[str]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read().splitlines()
    except OSError as e:
        raise FormatError(f"cannot read file: {e.strerror or e}", path)


def _is_skippable(line: str) -> bool:
    stripped = line.strip()
    return not stripped or stripped.startswith("#")


def load_edge_list(path: str) -> Tuple[WeightedGraph, IdMap]:
    """
    Read "source target weight" lines (tab or whitespace separated).

    String ids map to dense integers in first-appearance order.
    """
    id_map: IdMap = {}
    edges: List[Tuple[int, int, float]] = []
    line_of_edge: List[int] = []

    for number, line in enumerate(_open_lines(path), start=1):
        if _is_skippable(line):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise FormatError(f"expected 3 fields, got {len(fields)}", path, number)
        source, target, raw_weight = fields
        try:
            weight = float(raw_weight)
        except ValueError:
            raise FormatError(f"weight {raw_weight!r} is not a number", path, number)

        for name in (source, target):
            if name not in id_map:
                id_map[name] = len(id_map)
        edges.append((id_map[source], id_map[target], weight))
        line_of_edge.append(number)

    try:
        graph = build_graph(edges, node_count=len(id_map))
    except GraphError as e:
        line = line_of_edge[e.edge_index] if e.edge_index is not None else None
        raise FormatError(str(e), path, line)

    logger.info(f"Loaded {graph} from {path}")
    return graph, id_map


def save_edge_list(path: str, g: WeightedGraph, names: Optional[Sequence[str]] = None):
    """Write every undirected edge once as "source<TAB>target<TAB>weight" """
    us, vs, ws = g.edges()
    with open(path, "w", encoding="utf-8") as f:
        for u, v, w in zip(us, vs, ws):
            source = names[u] if names is not None else str(u)
            target = names[v] if names is not None else str(v)
            f.write(f"{source}\t{target}\t{float(w)!r}\n")
    logger.info(f"Wrote {g.edge_count} edges to {path}")


def load_labels(path: str, id_map: IdMap) -> List[str]:
    """Read "node-id<TAB>label" lines; every graph node must be labeled once"""
    labels: List[Optional[str]] = [None] * len(id_map)
    line_of_node: Dict[int, int] = {}

    for number, line in enumerate(_open_lines(path), start=1):
        if _is_skippable(line):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        fields = [field.strip() for field in fields]
        if len(fields) != 2 or not all(fields):
            raise FormatError("expected 'node-id<TAB>label'", path, number)
        name, label = fields
        if name not in id_map:
            raise FormatError(f"unknown node id {name!r}", path, number)
        node = id_map[name]
        if node in line_of_node:
            raise FormatError(
                f"duplicate label for node {name!r} (first on line {line_of_node[node]})",
                path,
                number,
            )
        line_of_node[node] = number
        labels[node] = label

    names = {node: name for name, node in id_map.items()}
    missing = [names[node] for node, label in enumerate(labels) if label is None]
    if missing:
        raise FormatError(f"missing label for node {missing[0]!r} ({len(missing)} unlabeled)", path)

    logger.info(f"Loaded {len(labels)} labels from {path}")
    return [str(label) for label in labels]


def save_labels(path: str, labels: Sequence[str], names: Optional[Sequence[str]] = None):
    with open(path, "w", encoding="utf-8") as f:
        for node, label in enumerate(labels):
            name = names[node] if names is not None else str(node)
            f.write(f"{name}\t{label}\n")


def save_corpus(path: str, corpus: Corpus):
    """One entry per line: "count<TAB>id id id ..." """
    with open(path, "w", encoding="utf-8") as f:
        for window, count in corpus:
            f.write(f"{count}\t{' '.join(str(v) for v in window)}\n")
    logger.info(f"Wrote {corpus!r} to {path}")


def load_corpus(path: str) -> Corpus:
    corpus = Corpus()
    for number, line in enumerate(_open_lines(path), start=1):
        if _is_skippable(line):
            continue
        if "\t" not in line:
            raise FormatError("expected 'count<TAB>node ids'", path, number)
        raw_count, raw_nodes = line.split("\t", 1)
        try:
            count = int(raw_count)
            nodes = [int(token) for token in raw_nodes.split()]
        except ValueError:
            raise FormatError("count and node ids must be integers", path, number)
        if count < 1:
            raise FormatError(f"count must be >= 1, got {count}", path, number)
        if not nodes:
            raise FormatError("empty node list", path, number)
        if len(nodes) < 2:
            raise FormatError("a window needs at least 2 nodes", path, number)
        if min(nodes) < 0:
            raise FormatError("node ids must be non-negative", path, number)
        corpus.add(nodes, count)

    logger.info(f"Loaded {corpus!r} from {path}")
    return corpus


def save_embeddings(path: str, vectors: np.ndarray, names: Optional[Sequence[str]] = None):
    """Header "n d", then "id v1 ... vd" per node at 17 significant digits"""
    n, d = vectors.shape
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{n} {d}\n")
        for node in range(n):
            name = names[node] if names is not None else str(node)
            values = " ".join(f"{float(x):.17g}" for x in vectors[node])
            f.write(f"{name} {values}\n")
    logger.info(f"Wrote {n}x{d} embeddings to {path}")


def load_embeddings(path: str) -> Tuple[np.ndarray, List[str]]:
    """Read an embedding file back into (n x d matrix, row ids)"""
    lines = [line for line in _open_lines(path) if line.strip()]
    if not lines:
        raise FormatError("empty embedding file", path)
    header = lines[0].split()
    try:
        n, d = int(header[0]), int(header[1])
    except (IndexError, ValueError):
        raise FormatError("header must be 'n d'", path, 1)
    if len(header) != 2 or n < 0 or d < 1:
        raise FormatError("header must be 'n d' with d >= 1", path, 1)
    if len(lines) - 1 != n:
        raise FormatError(f"header declares {n} rows, found {len(lines) - 1}", path)

    vectors = np.zeros((n, d), dtype=np.float64)
    names: List[str] = []
    for row, line in enumerate(lines[1:]):
        fields = line.split()
        name = fields[0]
        if len(fields) - 1 != d:
            raise FormatError(
                f"row {name!r} has {len(fields) - 1} values, header says {d}", path, row + 2
            )
        try:
            vectors[row] = [float(x) for x in fields[1:]]
        except ValueError:
            raise FormatError(f"row {name!r} has a non-numeric value", path, row + 2)
        names.append(name)

    return vectors, names


def align_embeddings(vectors: np.ndarray, names: Sequence[str], id_map: IdMap) -> np.ndarray:
    """Reorder embedding rows to the dense ids of id_map"""
    if len(names) != len(id_map):
        raise FormatError(
            f"embeddings cover {len(names)} nodes but the graph has {len(id_map)}"
        )
    aligned = np.zeros_like(vectors)
    for row, name in enumerate(names):
        if name not in id_map:
            raise FormatError(f"embedding row {name!r} is not a graph node")
        aligned[id_map[name]] = vectors[row]
    return aligned


def write_table(path: str, header: Sequence[str], rows: Sequence[Sequence]):
    """
    Tab-separated report table; floats written with repr for exact
    round-trip. A path of "-" writes to stdout.
    """
    if path == "-":
        _write_rows(sys.stdout, header, rows)
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        _write_rows(f, header, rows)
    logger.info(f"Wrote {len(rows)} rows to {path}")


def _write_rows(f: TextIO, header: Sequence[str], rows: Sequence[Sequence]):
    writer = csv.writer(f, delimiter="\t", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])


def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)
