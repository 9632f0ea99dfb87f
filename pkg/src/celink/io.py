"""Dataset loading: edge-list files, node-feature CSVs, relabeling tables.

Edge files carry two whitespace-separated integer ids per line; ``#``
starts a comment.  External ids may be sparse or unordered, so loading
relabels them to dense [0, n) by ascending external id and persists the
mapping next to the edge file (suffix ``.nodemap.csv``) for traceability.
Feature files are header-less CSV whose row i belongs to dense node i.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .graph import Graph, build_graph


def read_edge_file(path) -> List[Tuple[int, int]]:
    """Parse raw external-id pairs; errors carry the offending line number."""
    pairs: List[Tuple[int, int]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected two ids, got {len(parts)} tokens"
                )
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer id ({body!r})") from exc
            pairs.append((u, v))
    if not pairs:
        raise ValueError(f"{path}: no edges found (file empty or comments only)")
    return pairs


def read_feature_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric feature value") from exc
    if not rows:
        raise ValueError(f"{path}: empty feature file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged feature rows (widths {sorted(widths)})")
    return np.array(rows, dtype=np.float64)


def write_node_map(mapping: Dict[int, int], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["external_id", "node_id"])
        for ext, dense in sorted(mapping.items(), key=lambda kv: kv[1]):
            writer.writerow([ext, dense])


def read_node_map(path) -> Dict[int, int]:
    mapping: Dict[int, int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for ext, dense in reader:
            mapping[int(ext)] = int(dense)
    return mapping


def load_dataset(
    edge_path,
    feature_path=None,
    node_map_path=None,
) -> Graph:
    """Load a graph from disk, relabeling external ids to dense [0, n).

    Dense ids follow ascending external id, so feature row i must describe
    the i-th smallest external id.  The relabeling table is written to
    ``node_map_path`` (default: edge_path + ".nodemap.csv").
    """
    raw_pairs = read_edge_file(edge_path)
    external = sorted({x for pair in raw_pairs for x in pair})
    mapping = {ext: i for i, ext in enumerate(external)}
    n = len(external)
    edges = [(mapping[u], mapping[v]) for u, v in raw_pairs]
    features = None
    if feature_path is not None:
        features = read_feature_csv(feature_path)
        if features.shape[0] != n:
            raise ValueError(
                f"feature file has {features.shape[0]} rows but the graph has {n} nodes"
            )
    if node_map_path is None:
        node_map_path = str(edge_path) + ".nodemap.csv"
    write_node_map(mapping, node_map_path)
    return build_graph(edges, n, features)


def write_edge_file(g_or_edges, path, header: Optional[str] = None) -> None:
    edges = g_or_edges.edge_array if isinstance(g_or_edges, Graph) else g_or_edges
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for u, v in edges:
            fh.write(f"{int(u)} {int(v)}\n")


def write_labels_csv(labels: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "label"])
        for v, lab in enumerate(labels):
            writer.writerow([v, int(lab)])
