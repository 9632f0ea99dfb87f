"""Pairwise feature vectors for candidate links.

A pair (u, v) is described by four blocks, concatenated in fixed order:

  [embedding dot | hop-overlap grid | propagation products | community triple]

* embedding dot: scalar inner product of the two node embeddings
* hop-overlap grid: sketch estimates of |p-hop(u) intersect q-hop(v)| for
  every (p, q) in the configured hop set, row-major
* propagation products: Hadamard products of truncated personalized
  propagation vectors, one block of sketch-dim entries per radius
* community triple: (label_u, label_v, center-to-center hop distance)

When ``mask_target`` is set and (u, v) is an edge, all sketch propagation
and center-distance values are computed as if the edge were absent, which
keeps supervised targets from leaking into their own features.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .communities import CommunityPartition
from .graph import Graph, bfs_distances
from .sketches import QoSketch, masked_hop_rows


@dataclass(frozen=True)
class FeatureConfig:
    """Hop sets and propagation settings shared by all pair features."""

    de_hops: Tuple[int, ...] = (1, 2)
    ppr_radii: Tuple[int, ...] = (1, 2)
    restart: float = 0.15

    def __post_init__(self):
        if len(self.de_hops) == 0 or len(self.ppr_radii) == 0:
            raise ValueError("hop sets must be non-empty")
        if any(h < 0 for h in self.de_hops) or any(r < 0 for r in self.ppr_radii):
            raise ValueError("hops and radii must be nonnegative")
        if not (0.0 < self.restart <= 1.0):
            raise ValueError(f"restart must lie in (0, 1], got {self.restart}")

    @property
    def max_hop(self) -> int:
        return max(max(self.de_hops), max(self.ppr_radii))

    def vector_length(self, dim: int) -> int:
        """Total pair-vector length: 1 + |hops|^2 + |radii| * dim + 3."""
        return 1 + len(self.de_hops) ** 2 + len(self.ppr_radii) * dim + 3


@dataclass(eq=False)
class PairFeature:
    """Feature blocks for one node pair; see module docstring for layout."""

    u: int
    v: int
    emb_dot: float
    de: np.ndarray
    path: np.ndarray
    com: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([[self.emb_dot], self.de, self.path, self.com])


@dataclass(eq=False)
class CenterCache:
    """Center-to-center hop distances plus full BFS vectors per center.

    ``spd[a, b]`` is the distance between the centers of communities a and
    b; ``vectors[a]`` holds distances from center a to every node.  Both
    use the graph-size sentinel for unreachable entries.
    """

    spd: np.ndarray
    vectors: np.ndarray
    centers: np.ndarray


def center_distances(g: Graph, p: CommunityPartition) -> CenterCache:
    if p.centers is None:
        raise ValueError("partition has no centers")
    vectors = np.empty((p.k, g.n), dtype=np.int64)
    for a, c in enumerate(p.centers):
        vectors[a] = bfs_distances(g, int(c)).dist
    spd = vectors[:, p.centers]
    return CenterCache(spd=spd, vectors=vectors, centers=np.asarray(p.centers))


def _masked_center_distance(
    g: Graph, cache: CenterCache, a: int, b: int, u: int, v: int
) -> int:
    """Distance between centers a and b with edge (u, v) deleted.

    The cached value can only change when some shortest center path uses
    the deleted edge, which is cheap to rule out from the cached BFS
    vectors; only then is a fresh BFS run on the masked graph.
    """
    d = int(cache.spd[a, b])
    if a == b or d >= g.n:
        return d
    via_uv = cache.vectors[a, u] + 1 + cache.vectors[b, v] == d
    via_vu = cache.vectors[a, v] + 1 + cache.vectors[b, u] == d
    if not (via_uv or via_vu):
        return d
    masked = g.without_edges([(u, v)])
    return int(bfs_distances(masked, int(cache.centers[a])).dist[cache.centers[b]])


def community_feature(
    u: int,
    v: int,
    p: CommunityPartition,
    g: Graph,
    cache: Optional[CenterCache] = None,
) -> np.ndarray:
    """Community triple (label_u, label_v, center-to-center distance)."""
    if cache is None:
        cache = center_distances(g, p)
    a, b = int(p.assignment[u]), int(p.assignment[v])
    return np.array([a, b, int(cache.spd[a, b])], dtype=np.float64)


def pair_representation(
    g: Graph,
    sketch: QoSketch,
    embeddings: Optional[np.ndarray],
    p: CommunityPartition,
    u: int,
    v: int,
    config: FeatureConfig,
    mask_target: bool = False,
    cache: Optional[CenterCache] = None,
) -> PairFeature:
    """Assemble the full feature blocks for one pair.

    ``embeddings`` may be None (e.g. before any encoder exists), in which
    case the embedding dot product is zero.  ``mask_target`` only has an
    effect when (u, v) is an edge of ``g``.
    """
    if cache is None:
        cache = center_distances(g, p)
    masked = bool(mask_target and g.has_edge(u, v))
    if masked:
        rows = masked_hop_rows(sketch, g, u, v, config.max_hop)
        hop_u = {k: rows[k][u] for k in rows}
        hop_v = {k: rows[k][v] for k in rows}
    else:
        hop_u = {k: sketch.hop[k][u] for k in range(config.max_hop + 1)}
        hop_v = {k: sketch.hop[k][v] for k in range(config.max_hop + 1)}
    de = np.array(
        [float(hop_u[ph] @ hop_v[qh]) for ph in config.de_hops for qh in config.de_hops]
    )
    beta = config.restart
    path_blocks = []
    for r in config.ppr_radii:
        pu = np.zeros(sketch.dim)
        pv = np.zeros(sketch.dim)
        for k in range(r + 1):
            w = beta * (1.0 - beta) ** k
            pu += w * hop_u[k]
            pv += w * hop_v[k]
        path_blocks.append(pu * pv)
    path = np.concatenate(path_blocks)
    a, b = int(p.assignment[u]), int(p.assignment[v])
    spd = (
        _masked_center_distance(g, cache, a, b, u, v)
        if masked
        else int(cache.spd[a, b])
    )
    com = np.array([a, b, spd], dtype=np.float64)
    emb_dot = float(embeddings[u] @ embeddings[v]) if embeddings is not None else 0.0
    return PairFeature(u=int(u), v=int(v), emb_dot=emb_dot, de=de, path=path, com=com)


def static_feature_matrix(
    g: Graph,
    sketch: QoSketch,
    p: CommunityPartition,
    pairs: np.ndarray,
    config: FeatureConfig,
    mask_targets: bool = False,
    cache: Optional[CenterCache] = None,
) -> np.ndarray:
    """Vectorized [hop-overlap | propagation | community] blocks for many pairs.

    Everything except the embedding dot product, which depends on trainable
    parameters and is therefore assembled by the scorer.  Masking applies
    the closed-form sketch corrections row-wise, so batches mixing edges
    and non-edges stay cheap.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    m = len(pairs)
    if cache is None:
        cache = center_distances(g, p)
    us, vs = pairs[:, 0], pairs[:, 1]
    if mask_targets and m > 0:
        edge_mask = np.fromiter(
            (g.has_edge(int(u), int(v)) for u, v in pairs), dtype=bool, count=m
        )
    else:
        edge_mask = np.zeros(m, dtype=bool)
    max_hop = config.max_hop
    col = edge_mask.astype(np.float64)[:, None]
    hop_u = {0: sketch.base[us]}
    hop_v = {0: sketch.base[vs]}
    if max_hop >= 1:
        hop_u[1] = sketch.hop[1][us] - col * sketch.base[vs]
        hop_v[1] = sketch.hop[1][vs] - col * sketch.base[us]
    if max_hop >= 2:
        hop_u[2] = sketch.hop[2][us] - col * sketch.hop[1][vs]
        hop_v[2] = sketch.hop[2][vs] - col * sketch.hop[1][us]
    if max_hop >= 3:
        cn = np.zeros(m)
        for i in np.flatnonzero(edge_mask):
            cn[i] = np.intersect1d(
                g.neighbors(int(us[i])), g.neighbors(int(vs[i]))
            ).size
        deg = g.degrees
        corr_u = (
            sketch.hop[2][vs]
            + (deg[us] - 1)[:, None] * sketch.base[vs]
            + cn[:, None] * sketch.base[us]
        )
        corr_v = (
            sketch.hop[2][us]
            + (deg[vs] - 1)[:, None] * sketch.base[us]
            + cn[:, None] * sketch.base[vs]
        )
        hop_u[3] = sketch.hop[3][us] - col * corr_u
        hop_v[3] = sketch.hop[3][vs] - col * corr_v
    for k in range(4, max_hop + 1):
        # rare deep configuration: fall back to per-pair recomputation
        hop_u[k] = sketch.hop[k][us].copy()
        hop_v[k] = sketch.hop[k][vs].copy()
        for i in np.flatnonzero(edge_mask):
            rows = masked_hop_rows(sketch, g, int(us[i]), int(vs[i]), max_hop)
            hop_u[k][i] = rows[k][int(us[i])]
            hop_v[k][i] = rows[k][int(vs[i])]
    de_cols = [
        np.sum(hop_u[ph] * hop_v[qh], axis=1)
        for ph in config.de_hops
        for qh in config.de_hops
    ]
    de = np.stack(de_cols, axis=1) if m > 0 else np.empty((0, len(config.de_hops) ** 2))
    beta = config.restart
    path_blocks = []
    for r in config.ppr_radii:
        pu = np.zeros((m, sketch.dim))
        pv = np.zeros((m, sketch.dim))
        for k in range(r + 1):
            w = beta * (1.0 - beta) ** k
            pu += w * hop_u[k]
            pv += w * hop_v[k]
        path_blocks.append(pu * pv)
    path = (
        np.concatenate(path_blocks, axis=1)
        if m > 0
        else np.empty((0, len(config.ppr_radii) * sketch.dim))
    )
    a = p.assignment[us]
    b = p.assignment[vs]
    spd = cache.spd[a, b].astype(np.float64)
    for i in np.flatnonzero(edge_mask):
        spd[i] = _masked_center_distance(
            g, cache, int(a[i]), int(b[i]), int(us[i]), int(vs[i])
        )
    com = np.stack([a.astype(np.float64), b.astype(np.float64), spd], axis=1)
    return np.concatenate([de, path, com], axis=1)
