"""Stochastic block model sampling for synthetic benchmarks.

Blocks get contiguous id ranges.  Each intra-block pair is an edge with
probability p_in, each cross-block pair with p_out, all independent.  An
optional deletion step removes a uniform fraction of the realized
intra-block edges, which supports planted-recovery experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .graph import Graph, build_graph


@dataclass(frozen=True)
class SbmSpec:
    block_sizes: Tuple[int, ...]
    p_in: float
    p_out: float
    seed: int = 0
    delete_frac: float = 0.0

    def __post_init__(self):
        if len(self.block_sizes) == 0 or any(s < 1 for s in self.block_sizes):
            raise ValueError(f"block sizes must be positive, got {self.block_sizes}")
        for name, p in (("p_in", self.p_in), ("p_out", self.p_out)):
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if not (0.0 <= self.delete_frac < 1.0):
            raise ValueError(f"delete_frac must lie in [0, 1), got {self.delete_frac}")

    @property
    def n(self) -> int:
        return int(sum(self.block_sizes))


@dataclass(eq=False)
class SbmSample:
    """Generated graph, planted block labels, and any deleted intra edges."""

    graph: Graph
    labels: np.ndarray
    removed_edges: np.ndarray


def generate_sbm(spec: SbmSpec) -> SbmSample:
    """Sample a graph from the block model, deterministically per seed."""
    n = spec.n
    labels = np.repeat(np.arange(len(spec.block_sizes)), spec.block_sizes)
    rng = np.random.default_rng(spec.seed)
    iu, ju = np.triu_indices(n, k=1)
    intra = labels[iu] == labels[ju]
    p = np.where(intra, spec.p_in, spec.p_out)
    keep = rng.random(p.size) < p
    edges = np.stack([iu[keep], ju[keep]], axis=1)
    removed = np.empty((0, 2), dtype=np.int64)
    if spec.delete_frac > 0.0:
        is_intra = labels[edges[:, 0]] == labels[edges[:, 1]]
        intra_idx = np.flatnonzero(is_intra)
        n_del = int(np.floor(spec.delete_frac * intra_idx.size))
        if n_del > 0:
            drop = rng.choice(intra_idx, size=n_del, replace=False)
            removed = edges[np.sort(drop)].astype(np.int64)
            keep_mask = np.ones(len(edges), dtype=bool)
            keep_mask[drop] = False
            edges = edges[keep_mask]
    graph = build_graph(list(map(tuple, edges)), n)
    return SbmSample(graph=graph, labels=labels, removed_edges=removed)
