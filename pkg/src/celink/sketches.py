"""Quasi-orthogonal node sketches and truncated personalized propagation.

Every node draws an i.i.d. random base vector with zero mean and variance
1/F per coordinate, so distinct base vectors are nearly orthogonal while
each has squared norm concentrating at 1.  Propagating the base matrix
through adjacency powers turns inner products into unbiased estimates of
hop-neighborhood overlap counts: for example the 1-hop/1-hop product
estimates the number of common neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .graph import Graph


@dataclass(eq=False)
class QoSketch:
    """Base sketch matrix plus adjacency-propagated copies per hop.

    ``hop[p]`` holds A^p applied to the base matrix; ``hop[0]`` is the base
    itself.  All matrices are (n, dim) float64.
    """

    dim: int
    base: np.ndarray
    hop: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def max_hop(self) -> int:
        return max(self.hop)


@dataclass(frozen=True)
class PprVector:
    """Truncated personalized propagation vector for one node.

    ``vec`` equals sum_{k=0..radius} restart * (1 - restart)^k * (A^k base)[node],
    an exact finite sum, not an iterative approximation.
    """

    node: int
    radius: int
    restart: float
    vec: np.ndarray


def build_sketch(
    g: Graph,
    dim: int,
    max_hop: int,
    seed: int = 0,
    kind: str = "gaussian",
) -> QoSketch:
    """Draw the random base matrix and propagate it through A^1..A^max_hop.

    kind selects the base distribution: "gaussian" gives N(0, 1/dim)
    entries, "sign" gives +-1/sqrt(dim) with equal probability.  Both are
    zero mean with variance 1/dim per coordinate.
    """
    if dim <= 0:
        raise ValueError(f"sketch dim must be positive, got {dim}")
    if max_hop < 0:
        raise ValueError(f"max_hop must be nonnegative, got {max_hop}")
    rng = np.random.default_rng(seed)
    if kind == "gaussian":
        base = rng.normal(0.0, 1.0 / np.sqrt(dim), size=(g.n, dim))
    elif kind == "sign":
        base = rng.choice([-1.0, 1.0], size=(g.n, dim)) / np.sqrt(dim)
    else:
        raise ValueError(f"unknown sketch kind {kind!r}")
    adj = g.adjacency()
    hop = {0: base}
    for p in range(1, max_hop + 1):
        hop[p] = adj @ hop[p - 1]
    return QoSketch(dim=dim, base=base, hop=hop)


def de_feature(sketch: QoSketch, u: int, v: int, p: int, q: int) -> float:
    """Estimated overlap between the p-hop view of u and the q-hop view of v.

    The inner product hop[p][u] . hop[q][v] is an unbiased estimator of the
    number of (walk-weighted) nodes reachable in exactly p steps from u and
    q steps from v; for p = q = 1 that is the common-neighbor count.
    """
    if p not in sketch.hop or q not in sketch.hop:
        raise ValueError(
            f"hop pair ({p}, {q}) outside propagated range 0..{sketch.max_hop}"
        )
    return float(sketch.hop[p][u] @ sketch.hop[q][v])


def truncated_ppr(sketch: QoSketch, node: int, radius: int, restart: float) -> PprVector:
    """Exact finite-radius personalized propagation of the node's sketch."""
    if not (0.0 < restart <= 1.0):
        raise ValueError(f"restart must lie in (0, 1], got {restart}")
    if radius < 0 or radius > sketch.max_hop:
        raise ValueError(
            f"radius {radius} outside propagated range 0..{sketch.max_hop}"
        )
    vec = np.zeros(sketch.dim)
    for k in range(radius + 1):
        vec += restart * (1.0 - restart) ** k * sketch.hop[k][node]
    return PprVector(node=int(node), radius=radius, restart=restart, vec=vec)


def path_feature(a: PprVector, b: PprVector) -> np.ndarray:
    """Hadamard product of two propagation vectors with matching settings."""
    if a.radius != b.radius or a.restart != b.restart:
        raise ValueError(
            f"mismatched settings: ({a.radius}, {a.restart}) vs ({b.radius}, {b.restart})"
        )
    if a.vec.shape != b.vec.shape:
        raise ValueError("mismatched sketch dimensions")
    return a.vec * b.vec


def masked_hop_rows(
    sketch: QoSketch, g: Graph, u: int, v: int, max_hop: int
) -> Dict[int, Dict[int, np.ndarray]]:
    """Hop rows of u and v as they would be with edge (u, v) deleted.

    Uses closed-form corrections against the cached propagations: deleting
    (u, v) changes the 1-hop row of u by -base[v], the 2-hop row by
    -hop[1][v], and the 3-hop row by the bracketed combination below.  For
    deeper hops the masked graph is propagated directly.

    Returns {0: {u: row, v: row}, 1: {...}, ...} up to max_hop.
    """
    if not g.has_edge(u, v):
        raise ValueError(f"({u}, {v}) is not an edge; masking is undefined")
    if min(max_hop, 3) > sketch.max_hop:
        raise ValueError(
            f"masked hop {max_hop} exceeds propagated range 0..{sketch.max_hop}"
        )
    rows: Dict[int, Dict[int, np.ndarray]] = {0: {u: sketch.base[u], v: sketch.base[v]}}
    deg = g.degrees
    if max_hop >= 1:
        rows[1] = {
            u: sketch.hop[1][u] - sketch.base[v],
            v: sketch.hop[1][v] - sketch.base[u],
        }
    if max_hop >= 2:
        rows[2] = {
            u: sketch.hop[2][u] - sketch.hop[1][v],
            v: sketch.hop[2][v] - sketch.hop[1][u],
        }
    if max_hop >= 3:
        cn = np.intersect1d(g.neighbors(u), g.neighbors(v)).size
        rows[3] = {
            u: sketch.hop[3][u]
            - sketch.hop[2][v]
            - (deg[u] - 1) * sketch.base[v]
            - cn * sketch.base[u],
            v: sketch.hop[3][v]
            - sketch.hop[2][u]
            - (deg[v] - 1) * sketch.base[u]
            - cn * sketch.base[v],
        }
    if max_hop > 3:
        masked = g.without_edges([(u, v)])
        adj = masked.adjacency()
        mat = sketch.base
        for p in range(1, max_hop + 1):
            mat = adj @ mat
            if p > 3:
                rows.setdefault(p, {})
                rows[p][u] = mat[u]
                rows[p][v] = mat[v]
    return rows


def masked_truncated_ppr(
    sketch: QoSketch,
    g: Graph,
    u: int,
    v: int,
    node: int,
    radius: int,
    restart: float,
) -> PprVector:
    """Truncated propagation for ``node`` (one of u, v) with edge (u, v) masked."""
    if node not in (u, v):
        raise ValueError("masked propagation is only available at the pair endpoints")
    rows = masked_hop_rows(sketch, g, u, v, radius)
    vec = np.zeros(sketch.dim)
    for k in range(radius + 1):
        vec += restart * (1.0 - restart) ** k * rows[k][node]
    return PprVector(node=int(node), radius=radius, restart=restart, vec=vec)
