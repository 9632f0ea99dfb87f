"""Fluid-communities detection on undirected graphs.

Communities behave like expanding and contracting fluids: each node
repeatedly adopts the label whose members, weighted by the inverse of the
current community size, dominate its closed neighborhood.  Updates are
asynchronous, in seeded random order, with the order reshuffled every sweep.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .graph import Graph


@dataclass(eq=False)
class CommunityPartition:
    """Assignment of every node to exactly one of k communities.

    ``centers`` stays None until a centrality module fills it with one
    representative node per community.
    """

    k: int
    assignment: np.ndarray
    centers: Optional[np.ndarray] = None

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == label)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def with_centers(self, centers: np.ndarray) -> "CommunityPartition":
        centers = np.asarray(centers, dtype=np.int64)
        if centers.shape != (self.k,):
            raise ValueError(f"expected {self.k} centers, got shape {centers.shape}")
        return replace(self, centers=centers)


def _sweep(g: Graph, label: np.ndarray, sizes: np.ndarray, order: np.ndarray) -> int:
    """One asynchronous update pass; returns the number of label changes."""
    changes = 0
    for v in order:
        votes: dict = {}
        cur = label[v]
        if cur >= 0:
            votes[cur] = 1.0 / sizes[cur]
        for w in g.neighbors(v):
            lw = label[w]
            if lw >= 0:
                votes[lw] = votes.get(lw, 0.0) + 1.0 / sizes[lw]
        if not votes:
            continue  # no labeled node in the ego network yet
        best = max(votes.values())
        winners = [c for c, s in votes.items() if s >= best - 1e-12]
        if cur >= 0 and cur in winners:
            new = cur
        else:
            new = min(winners)
        if new == cur:
            continue
        if cur >= 0:
            if sizes[cur] == 1:
                continue  # last member may not abandon its community
            sizes[cur] -= 1
        sizes[new] += 1
        label[v] = new
        changes += 1
    return changes


def _run_fluidc(
    g: Graph,
    seed_nodes: np.ndarray,
    max_sweeps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    k = len(seed_nodes)
    label = np.full(g.n, -1, dtype=np.int64)
    sizes = np.zeros(k, dtype=np.int64)
    for c, v in enumerate(seed_nodes):
        label[v] = c
        sizes[c] = 1
    for _ in range(max_sweeps):
        order = rng.permutation(g.n)
        if _sweep(g, label, sizes, order) == 0:
            break
    # components that never saw a seed stay unlabeled; fold them into the
    # currently smallest community so the partition stays exhaustive
    for v in np.flatnonzero(label < 0):
        target = int(np.argmin(sizes))
        label[v] = target
        sizes[target] += 1
    return label


def fluidc(g: Graph, k: int, max_sweeps: int = 100, seed: int = 0) -> CommunityPartition:
    """Detect k communities with the fluid update rule.

    Parameters
    ----------
    g : Graph
    k : number of communities; must satisfy 1 <= k <= n
    max_sweeps : hard cap on full update passes; the run stops early at the
        first sweep that changes no label
    seed : drives seed-node choice and the per-sweep node orderings

    Returns
    -------
    CommunityPartition with labels in [0, k) covering every node.
    """
    if not (1 <= k <= g.n):
        raise ValueError(f"k must lie in [1, {g.n}], got {k}")
    rng = np.random.default_rng(seed)
    seed_nodes = rng.choice(g.n, size=k, replace=False)
    label = _run_fluidc(g, seed_nodes, max_sweeps, rng)
    return CommunityPartition(k=k, assignment=label)


def partition_matrix(p: CommunityPartition) -> np.ndarray:
    """One-hot indicator matrix S with S[v, c] = 1 iff node v has label c."""
    s = np.zeros((p.assignment.size, p.k), dtype=np.float64)
    s[np.arange(p.assignment.size), p.assignment] = 1.0
    return s


def save_partition_csv(p: CommunityPartition, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "community_id"])
        for v, c in enumerate(p.assignment):
            writer.writerow([v, int(c)])


def load_partition_csv(path) -> CommunityPartition:
    pairs = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["node_id", "community_id"]:
            raise ValueError(f"unexpected partition header {header}")
        for row in reader:
            pairs.append((int(row[0]), int(row[1])))
    pairs.sort()
    assignment = np.array([c for _, c in pairs], dtype=np.int64)
    return CommunityPartition(k=int(assignment.max()) + 1, assignment=assignment)
