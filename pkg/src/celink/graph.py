"""Immutable undirected graph with CSR-style adjacency, BFS, and edge splits.

Node ids are dense integers in [0, n).  Edges are stored once per direction
inside the adjacency arrays; the canonical edge list keeps (u, v) with u < v
in lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from collections import deque
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp


@dataclass(eq=False)
class Graph:
    """Undirected simple graph over dense node ids.

    Treat instances as immutable: every mutation-style operation returns a
    new Graph.  ``indptr``/``indices`` follow the usual CSR convention with
    neighbor lists sorted ascending.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    features: Optional[np.ndarray] = None

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Canonical (m, 2) array of edges with u < v, lexicographically sorted."""
        if self.indices.size == 0:
            return np.empty((0, 2), dtype=np.int64)
        src = np.repeat(np.arange(self.n), self.degrees)
        mask = src < self.indices
        edges = np.stack([src[mask], self.indices[mask]], axis=1)
        # CSR order with sorted neighbor lists is already lexicographic
        return edges.astype(np.int64)

    @cached_property
    def _edge_set(self) -> set:
        return {(int(u), int(v)) for u, v in self.edge_array}

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (int(u), int(v)) in self._edge_set

    def adjacency(self) -> sp.csr_matrix:
        """Binary adjacency as a scipy CSR matrix."""
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix(
            (data, self.indices, self.indptr), shape=(self.n, self.n)
        )

    def without_edges(self, edges: Iterable[tuple]) -> "Graph":
        drop = {(min(int(u), int(v)), max(int(u), int(v))) for u, v in edges}
        keep = [e for e in map(tuple, self.edge_array) if (e[0], e[1]) not in drop]
        return build_graph(keep, self.n, self.features)

    def with_edges(self, edges: Iterable[tuple]) -> "Graph":
        combined = list(map(tuple, self.edge_array)) + [tuple(e) for e in edges]
        return build_graph(combined, self.n, self.features)


@dataclass(frozen=True)
class DistanceVector:
    """Hop counts from a single source; unreachable nodes carry sentinel n."""

    source: int
    dist: np.ndarray


@dataclass(eq=False)
class EdgeSplit:
    """Disjoint train/valid/test positives plus fixed negative pairs.

    Negatives are non-edges of the full graph, sampled once at split time
    and shared across every method evaluated on the split.
    """

    train_edges: np.ndarray
    valid_edges: np.ndarray
    test_edges: np.ndarray
    valid_neg: np.ndarray
    test_neg: np.ndarray


def build_graph(
    edges: Sequence, n: int, features: Optional[np.ndarray] = None
) -> Graph:
    """Construct a Graph from an iterable of (u, v) pairs.

    Duplicate pairs and both orientations collapse to a single edge.
    Self loops are rejected, as are endpoints outside [0, n).
    """
    if n <= 0:
        raise ValueError(f"node count must be positive, got {n}")
    dedup = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) outside id range [0, {n})")
        if u > v:
            u, v = v, u
        dedup.add((u, v))
    if features is not None:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != n:
            raise ValueError(
                f"feature matrix has {features.shape[0]} rows, expected {n}"
            )
    counts = np.zeros(n, dtype=np.int64)
    for u, v in dedup:
        counts[u] += 1
        counts[v] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int64)
    cursor = indptr[:-1].copy()
    for u, v in dedup:
        indices[cursor[u]] = v
        cursor[u] += 1
        indices[cursor[v]] = u
        cursor[v] += 1
    for v in range(n):
        seg = indices[indptr[v]:indptr[v + 1]]
        seg.sort()
    return Graph(n=n, indptr=indptr, indices=indices, features=features)


def bfs_distances(g: Graph, source: int) -> DistanceVector:
    """Hop counts from source to every node; sentinel n marks unreachable."""
    if not (0 <= source < g.n):
        raise ValueError(f"source {source} outside [0, {g.n})")
    dist = np.full(g.n, g.n, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        for w in g.neighbors(v):
            if dist[w] == g.n:
                dist[w] = dv + 1
                queue.append(w)
    return DistanceVector(source=int(source), dist=dist)


def _pair_key(u: int, v: int) -> tuple:
    return (u, v) if u < v else (v, u)


def sample_nonedges(
    g: Graph,
    count: int,
    rng: np.random.Generator,
    forbidden: Optional[set] = None,
) -> np.ndarray:
    """Sample distinct non-edge pairs uniformly at random.

    The draw is capped at the number of available non-edges; callers that
    need exact counts should check the returned shape.
    """
    forbidden = set() if forbidden is None else set(forbidden)
    total_pairs = g.n * (g.n - 1) // 2
    available = total_pairs - g.num_edges - len(forbidden)
    target = min(count, max(available, 0))
    picked: list = []
    seen = set()
    if target == 0:
        return np.empty((0, 2), dtype=np.int64)
    # rejection sampling with a dense fallback for crowded graphs
    attempts = 0
    max_attempts = 50 * target + 1000
    while len(picked) < target and attempts < max_attempts:
        k = max(target - len(picked), 16)
        us = rng.integers(0, g.n, size=4 * k)
        vs = rng.integers(0, g.n, size=4 * k)
        for u, v in zip(us, vs):
            if u == v:
                continue
            key = _pair_key(int(u), int(v))
            if key in seen or key in forbidden or key in g._edge_set:
                continue
            seen.add(key)
            picked.append(key)
            if len(picked) == target:
                break
        attempts += 1
    if len(picked) < target:
        pool = [
            (u, v)
            for u in range(g.n)
            for v in range(u + 1, g.n)
            if (u, v) not in g._edge_set and (u, v) not in forbidden and (u, v) not in seen
        ]
        need = target - len(picked)
        idx = rng.choice(len(pool), size=need, replace=False)
        picked.extend(pool[i] for i in idx)
    return np.array(picked, dtype=np.int64)


def split_edges(
    g: Graph,
    fractions: Sequence[float],
    seed: int,
    neg_per_pos: int = 1,
) -> EdgeSplit:
    """Randomly partition edges into train/valid/test and draw fixed negatives.

    ``fractions`` holds (train, valid, test) shares summing to 1.  Counts
    round as floor(f_train * m) and floor(f_valid * m); the test set takes
    the remainder.  Negatives for valid and test are disjoint non-edge sets
    of size neg_per_pos times the respective positive count.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ValueError(f"need three positive fractions, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got sum {sum(fractions)!r}")
    m = g.num_edges
    if m < 3:
        raise ValueError(f"need at least 3 edges to split, graph has {m}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(m)
    edges = g.edge_array[order]
    n_train = int(np.floor(fractions[0] * m))
    n_valid = int(np.floor(fractions[1] * m))
    train = edges[:n_train]
    valid = edges[n_train:n_train + n_valid]
    test = edges[n_train + n_valid:]
    valid_neg = sample_nonedges(g, neg_per_pos * len(valid), rng)
    taken = {(int(u), int(v)) for u, v in valid_neg}
    test_neg = sample_nonedges(g, neg_per_pos * len(test), rng, forbidden=taken)
    return EdgeSplit(
        train_edges=train,
        valid_edges=valid,
        test_edges=test,
        valid_neg=valid_neg,
        test_neg=test_neg,
    )


def training_graph(g: Graph, split: EdgeSplit) -> Graph:
    """Graph restricted to the training edges (same node set and features)."""
    return build_graph(list(map(tuple, split.train_edges)), g.n, g.features)
