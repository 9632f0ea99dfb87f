"""Node centrality scores: PageRank, degree, betweenness, closeness.

All scores are returned as dense float64 vectors indexed by node id.
Betweenness uses the exact dependency-accumulation algorithm; closeness is
component-scaled so disconnected graphs stay comparable.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass

import numpy as np

from .communities import CommunityPartition
from .graph import Graph

CENTRALITY_KINDS = ("degree", "betweenness", "closeness", "pagerank")


class ConvergenceError(RuntimeError):
    """Power iteration ran out of iterations; carries the last residual."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations, residual {residual:.3e}"
        )


@dataclass(frozen=True)
class CentralityScores:
    kind: str
    scores: np.ndarray


def pagerank(
    g: Graph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> np.ndarray:
    """Stationary PageRank vector under uniform teleportation.

    Iterates pr <- (1 - damping)/n + damping * (A D^-1 pr + dangling/n)
    until the L1 change drops below tol.  Mass from degree-zero nodes is
    redistributed uniformly, so the vector keeps summing to one.
    """
    if not (0.0 < damping < 1.0):
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    n = g.n
    deg = g.degrees.astype(np.float64)
    dangling = deg == 0
    inv_deg = np.where(dangling, 0.0, 1.0 / np.maximum(deg, 1.0))
    adj = g.adjacency()
    pr = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for _ in range(max_iter):
        outflow = pr * inv_deg
        new = base + damping * (adj @ outflow + pr[dangling].sum() / n)
        residual = float(np.abs(new - pr).sum())
        pr = new
        if residual < tol:
            return pr / pr.sum()
    raise ConvergenceError(max_iter, residual)


def _degree_centrality(g: Graph) -> np.ndarray:
    if g.n == 1:
        return np.zeros(1)
    return g.degrees.astype(np.float64) / (g.n - 1)


def _betweenness_centrality(g: Graph) -> np.ndarray:
    """Exact shortest-path betweenness, normalized over unordered pairs."""
    n = g.n
    raw = np.zeros(n)
    for s in range(n):
        # single-source shortest-path DAG via BFS
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        preds: list = [[] for _ in range(n)]
        order = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # back-propagate pair dependencies
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                raw[w] += delta[w]
    if n <= 2:
        return np.zeros(n)
    # each unordered pair is counted from both endpoints
    return raw / 2.0 / ((n - 1) * (n - 2) / 2.0)


def _closeness_centrality(g: Graph) -> np.ndarray:
    """Component-scaled closeness: (r-1)^2 / ((n-1) * sum of distances)."""
    from .graph import bfs_distances

    n = g.n
    scores = np.zeros(n)
    if n == 1:
        return scores
    for v in range(n):
        dist = bfs_distances(g, v).dist
        reach = dist < n
        r = int(reach.sum())
        total = int(dist[reach].sum())
        if r > 1 and total > 0:
            scores[v] = (r - 1) / total * ((r - 1) / (n - 1))
    return scores


def centrality(g: Graph, kind: str) -> CentralityScores:
    """Compute one of the supported centrality score vectors."""
    if kind == "degree":
        scores = _degree_centrality(g)
    elif kind == "betweenness":
        scores = _betweenness_centrality(g)
    elif kind == "closeness":
        scores = _closeness_centrality(g)
    elif kind == "pagerank":
        scores = pagerank(g)
    else:
        raise ValueError(f"unknown centrality kind {kind!r}; expected one of {CENTRALITY_KINDS}")
    return CentralityScores(kind=kind, scores=scores)


def community_centers(
    g: Graph, p: CommunityPartition, scores: CentralityScores
) -> CommunityPartition:
    """Pick the highest-scoring node of each community as its center.

    Scores come from the full graph, not the community subgraphs.  Ties
    resolve to the smaller node id.
    """
    if scores.scores.shape != (g.n,):
        raise ValueError("score vector does not match graph size")
    centers = np.full(p.k, -1, dtype=np.int64)
    best = np.full(p.k, -np.inf)
    for v in range(g.n):
        c = p.assignment[v]
        if scores.scores[v] > best[c]:
            best[c] = scores.scores[v]
            centers[c] = v
    return p.with_centers(centers)


def save_scores_csv(scores: CentralityScores, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", scores.kind])
        for v, s in enumerate(scores.scores):
            writer.writerow([v, repr(float(s))])


def load_scores_csv(path) -> CentralityScores:
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        kind = header[1]
        for row in reader:
            values.append((int(row[0]), float(row[1])))
    values.sort()
    return CentralityScores(kind=kind, scores=np.array([s for _, s in values]))
