"""Global structural encoding: BFS distances to community centers.

Each node gets a K-vector of hop counts to the K community centers.  The
raw integer matrix keeps the sentinel n for unreachable pairs; the
normalized view maps every column into [0, 1] with sentinels pinned at 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .communities import CommunityPartition
from .graph import Graph, bfs_distances


@dataclass(eq=False)
class StructuralEncoding:
    """Raw center-distance matrix plus the normalization recipe.

    ``matrix`` is (n, K) int64 with sentinel value n for unreachable
    center columns.  ``normalization`` records the scheme applied by
    :meth:`normalized` so exported artifacts stay self-describing.
    """

    matrix: np.ndarray
    sentinel: int
    normalization: dict = field(
        default_factory=lambda: {"scheme": "minmax", "sentinel_maps_to": 1.0}
    )

    def normalized(self) -> np.ndarray:
        """Per-column min-max rescale to [0, 1].

        Sentinel entries are first clamped to the column's finite maximum
        plus one, which lands them exactly at 1 after rescaling.  A column
        with no spread maps to all zeros.
        """
        out = np.empty(self.matrix.shape, dtype=np.float64)
        for j in range(self.matrix.shape[1]):
            col = self.matrix[:, j].astype(np.float64)
            infinite = col >= self.sentinel
            finite_max = col[~infinite].max() if (~infinite).any() else 0.0
            col[infinite] = finite_max + 1.0
            top = col.max()
            out[:, j] = col / top if top > 0 else 0.0
        return out


@dataclass(eq=False)
class AugmentedFeatures:
    """Node features with the normalized encoding appended column-wise."""

    matrix: np.ndarray
    raw_dim: int
    encoding_dim: int


def structural_encoding(g: Graph, p: CommunityPartition) -> StructuralEncoding:
    """Distances from every node to each community center.

    Column order follows community index, so the encoding is aligned with
    the partition's ``centers`` array.
    """
    if p.centers is None:
        raise ValueError("partition has no centers; run community_centers first")
    mat = np.empty((g.n, p.k), dtype=np.int64)
    for j, c in enumerate(p.centers):
        mat[:, j] = bfs_distances(g, int(c)).dist
    return StructuralEncoding(matrix=mat, sentinel=g.n)


def augment_features(x, enc: StructuralEncoding) -> AugmentedFeatures:
    """Concatenate raw node features with the normalized encoding.

    ``x`` may be None for featureless graphs, in which case the encoding
    alone forms the result.  The first ``raw_dim`` columns of the output
    equal ``x`` unchanged.
    """
    norm = enc.normalized()
    if x is None:
        return AugmentedFeatures(matrix=norm, raw_dim=0, encoding_dim=norm.shape[1])
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != norm.shape[0]:
        raise ValueError(
            f"feature rows {x.shape} incompatible with encoding rows {norm.shape[0]}"
        )
    return AugmentedFeatures(
        matrix=np.concatenate([x, norm], axis=1),
        raw_dim=x.shape[1],
        encoding_dim=norm.shape[1],
    )


def save_encoding_csv(enc: StructuralEncoding, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sentinel", enc.sentinel])
        for row in enc.matrix:
            writer.writerow([int(x) for x in row])


def load_encoding_csv(path) -> StructuralEncoding:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        sentinel = int(header[1])
        rows = [[int(x) for x in row] for row in reader]
    return StructuralEncoding(matrix=np.array(rows, dtype=np.int64), sentinel=sentinel)
