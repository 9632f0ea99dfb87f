"""Link prediction evaluation: neighborhood heuristics and hit rate at k.

The hit-rate convention is pessimistic about ties: a negative scoring
exactly equal to a positive counts as ranked above it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graph import EdgeSplit, Graph

HEURISTIC_KINDS = ("cn", "aa", "ra")


def heuristic_score(g: Graph, u: int, v: int, kind: str) -> float:
    """Common-neighbor style similarity between u and v.

    cn counts shared neighbors; aa sums 1/log(degree) over shared
    neighbors, skipping degree-1 neighbors whose log would vanish;
    ra sums 1/degree.
    """
    shared = np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True)
    if kind == "cn":
        return float(shared.size)
    deg = g.degrees[shared].astype(np.float64)
    if kind == "aa":
        ok = deg > 1.0
        return float(np.sum(1.0 / np.log(deg[ok])))
    if kind == "ra":
        return float(np.sum(1.0 / deg))
    raise ValueError(f"unknown heuristic {kind!r}; expected one of {HEURISTIC_KINDS}")


def heuristic_scores(g: Graph, pairs: np.ndarray, kind: str) -> np.ndarray:
    pairs = np.asarray(pairs).reshape(-1, 2)
    return np.array([heuristic_score(g, int(u), int(v), kind) for u, v in pairs])


def hit_rate_at_k(pos_scores, neg_scores, k: int) -> float:
    """Fraction of positives with fewer than k negatives scoring >= them."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0:
        raise ValueError("empty positive score set")
    if neg.size == 0:
        return 1.0
    neg_sorted = np.sort(neg)
    # negatives >= pos[i], ties counted against the positive
    above = neg.size - np.searchsorted(neg_sorted, pos, side="left")
    return float(np.mean(above < k))


@dataclass(eq=False)
class EvalReport:
    """Aggregated metric over one or more evaluation runs."""

    metric: str
    k: int
    mean: float
    std: float
    runs: list = field(default_factory=list)
    config: dict = field(default_factory=dict)


def make_report(metric: str, k: int, runs: Sequence[float], config: dict | None = None) -> EvalReport:
    runs = [float(r) for r in runs]
    if not runs:
        raise ValueError("no runs to aggregate")
    return EvalReport(
        metric=metric,
        k=k,
        mean=float(np.mean(runs)),
        std=float(np.std(runs)),
        runs=runs,
        config=dict(config or {}),
    )


def evaluate(
    scorer: Callable[[np.ndarray, int], np.ndarray],
    split: EdgeSplit,
    k: int,
    seeds: Sequence[int] = (0,),
    config: dict | None = None,
) -> EvalReport:
    """Score the test positives against the fixed test negatives per seed.

    ``scorer(pairs, seed)`` returns one score per row of ``pairs``; the
    same negative pool is reused across seeds and methods so hit rates
    stay comparable.
    """
    runs = []
    for seed in seeds:
        pos = np.asarray(scorer(split.test_edges, int(seed)), dtype=np.float64)
        neg = np.asarray(scorer(split.test_neg, int(seed)), dtype=np.float64)
        if pos.shape[0] != len(split.test_edges) or neg.shape[0] != len(split.test_neg):
            raise ValueError("scorer returned wrong number of scores")
        runs.append(hit_rate_at_k(pos, neg, k))
    return make_report(f"HR@{k}", k, runs, config)


def heuristic_evaluator(g: Graph, kind: str) -> Callable[[np.ndarray, int], np.ndarray]:
    """Adapter turning a neighborhood heuristic into an evaluate() scorer."""

    def score(pairs: np.ndarray, seed: int) -> np.ndarray:
        return heuristic_scores(g, pairs, kind)

    return score


def save_report_json(report: EvalReport, path) -> None:
    payload = {
        "metric": report.metric,
        "k": report.k,
        "mean": report.mean,
        "std": report.std,
        "runs": report.runs,
        "config": report.config,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report_json(path) -> EvalReport:
    with open(path) as fh:
        payload = json.load(fh)
    return EvalReport(
        metric=payload["metric"],
        k=int(payload["k"]),
        mean=float(payload["mean"]),
        std=float(payload["std"]),
        runs=[float(r) for r in payload["runs"]],
        config=payload["config"],
    )
