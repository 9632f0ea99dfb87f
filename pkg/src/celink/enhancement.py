"""Confidence-guided graph enhancement: add plausible edges, prune weak ones.

Candidates are same-community non-adjacent pairs touching at least one
high-PageRank node.  A confidence model scores candidates and existing
edges; the top slice of candidates is added and the bottom slice of edges
removed, with all ties broken by lexicographic pair order so plans are
deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .centrality import CentralityScores, community_centers, pagerank
from .communities import CommunityPartition, fluidc
from .encoding import augment_features, structural_encoding
from .graph import EdgeSplit, Graph
from .model import (
    ModelParams,
    TrainConfig,
    derive_sketch_seed,
    encoder_input,
    expand_static,
    normalized_adjacency,
    predict_probs,
    train,
)
from .pairfeat import center_distances, static_feature_matrix
from .sketches import build_sketch

Pair = Tuple[int, int]


@dataclass(eq=False)
class EnhancementPlan:
    """Record of one enhancement pass: candidates, additions, removals."""

    cand: np.ndarray
    added: np.ndarray
    removed: np.ndarray
    add_frac: float
    remove_frac: float
    top_m: int


def candidate_edges(
    g: Graph,
    p: CommunityPartition,
    scores: CentralityScores,
    top_m: int = 100,
) -> np.ndarray:
    """Non-adjacent same-community pairs with a top-scoring endpoint.

    ``top_m`` is capped at n; score ties at the cutoff resolve toward the
    smaller node id.  Pairs come back as an (m, 2) array with u < v in
    lexicographic order.
    """
    if top_m < 1:
        raise ValueError(f"top_m must be positive, got {top_m}")
    top_m = min(top_m, g.n)
    order = np.lexsort((np.arange(g.n), -scores.scores))
    top_nodes = order[:top_m]
    seen = set()
    for t in top_nodes:
        t = int(t)
        members = p.members(int(p.assignment[t]))
        adjacent = g.neighbors(t)
        blocked = np.isin(members, adjacent)
        for w in members[~blocked]:
            w = int(w)
            if w == t:
                continue
            seen.add((t, w) if t < w else (w, t))
    if not seen:
        return np.empty((0, 2), dtype=np.int64)
    cand = np.array(sorted(seen), dtype=np.int64)
    return cand


def enhance_graph(
    g: Graph,
    cand: np.ndarray,
    prob: Dict[Pair, float],
    add_frac: float,
    remove_frac: float,
    top_m: int = 0,
) -> Tuple[Graph, EnhancementPlan]:
    """Apply the add/remove slices and return the rewired graph plus plan.

    ``prob`` must contain a confidence for every candidate and every
    existing edge.  floor(add_frac * |cand|) candidates with the highest
    confidence are added; floor(remove_frac * |E|) edges with the lowest
    confidence are removed.  Setting both fractions to zero reproduces the
    input graph exactly.
    """
    if not (0.0 <= add_frac <= 1.0) or not (0.0 <= remove_frac <= 1.0):
        raise ValueError(
            f"fractions must lie in [0, 1], got ({add_frac}, {remove_frac})"
        )
    cand = np.asarray(cand, dtype=np.int64).reshape(-1, 2)
    edges = g.edge_array

    def lookup(u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        if key not in prob:
            raise ValueError(f"missing confidence for required pair {key}")
        return float(prob[key])

    n_add = int(np.floor(add_frac * len(cand)))
    n_rm = int(np.floor(remove_frac * len(edges)))
    cand_keys = sorted(
        ((-lookup(int(u), int(v)), (int(u), int(v))) for u, v in cand)
    )
    added = np.array([pair for _, pair in cand_keys[:n_add]], dtype=np.int64).reshape(-1, 2)
    edge_keys = sorted(
        ((lookup(int(u), int(v)), (int(u), int(v))) for u, v in edges)
    )
    removed = np.array([pair for _, pair in edge_keys[:n_rm]], dtype=np.int64).reshape(-1, 2)
    plan = EnhancementPlan(
        cand=cand,
        added=added,
        removed=removed,
        add_frac=float(add_frac),
        remove_frac=float(remove_frac),
        top_m=int(top_m),
    )
    new_graph = g.without_edges(map(tuple, removed)).with_edges(map(tuple, added))
    return new_graph, plan


@dataclass(eq=False)
class ConfidenceArtifacts:
    """Everything the confidence pretraining pass produced, for reuse."""

    prob: Dict[Pair, float]
    params: ModelParams
    partition: CommunityPartition
    scores: CentralityScores
    cand: np.ndarray


def pretrain_confidence(
    g: Graph,
    split: EdgeSplit,
    config: TrainConfig,
    num_communities: int = 4,
    top_m: int = 100,
    partition: Optional[CommunityPartition] = None,
    scores: Optional[CentralityScores] = None,
    features: Optional[np.ndarray] = None,
) -> ConfidenceArtifacts:
    """Train the scorer on the raw training graph and score required pairs.

    ``g`` must already be the training graph (no held-out edges).  The
    returned mapping covers every candidate pair and every existing edge,
    which is exactly the domain enhance_graph needs.  Deterministic for a
    fixed config seed.
    """
    if partition is None:
        partition = fluidc(g, num_communities, seed=config.seed)
    if scores is None:
        scores = CentralityScores(kind="pagerank", scores=pagerank(g))
    if partition.centers is None:
        partition = community_centers(g, partition, scores)
    enc = structural_encoding(g, partition)
    augmented = augment_features(features, enc)
    params = train(g, split, augmented, partition, config)
    cand = candidate_edges(g, partition, scores, top_m=top_m)
    need = np.concatenate([cand, g.edge_array], axis=0)
    sketch = build_sketch(
        g,
        config.sketch_dim,
        config.feature.max_hop,
        seed=derive_sketch_seed(config.seed),
    )
    cache = center_distances(g, partition)
    if config.use_pair_blocks:
        raw = static_feature_matrix(
            g, sketch, partition, need, config.feature,
            mask_targets=config.mask_targets, cache=cache,
        )
        static = expand_static(raw, partition.k, config.feature, config.sketch_dim)
    else:
        static = np.empty((len(need), 0))
    xin = encoder_input(augmented.matrix, g.n)
    probs = predict_probs(params, normalized_adjacency(g), xin, need, static)
    mapping = {
        (int(u), int(v)): float(s) for (u, v), s in zip(need, probs)
    }
    return ConfidenceArtifacts(
        prob=mapping, params=params, partition=partition, scores=scores, cand=cand
    )


def save_plan_json(plan: EnhancementPlan, path) -> None:
    payload = {
        "cand": [[int(u), int(v)] for u, v in plan.cand],
        "added": [[int(u), int(v)] for u, v in plan.added],
        "removed": [[int(u), int(v)] for u, v in plan.removed],
        "add_frac": plan.add_frac,
        "remove_frac": plan.remove_frac,
        "top_m": plan.top_m,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_plan_json(path) -> EnhancementPlan:
    with open(path) as fh:
        payload = json.load(fh)
    to_arr = lambda rows: np.array(rows, dtype=np.int64).reshape(-1, 2)
    return EnhancementPlan(
        cand=to_arr(payload["cand"]),
        added=to_arr(payload["added"]),
        removed=to_arr(payload["removed"]),
        add_frac=float(payload["add_frac"]),
        remove_frac=float(payload["remove_frac"]),
        top_m=int(payload["top_m"]),
    )
