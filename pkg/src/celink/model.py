"""Trainable link scorer: graph encoder, pair head, and composite loss.

The encoder stacks L rounds of symmetric-normalized neighbor averaging
(self loops included), each followed by a linear map and tanh.  The head
is a one-hidden-layer MLP over [embedding dot | expanded static features]
ending in a sigmoid.  Training minimizes

    total = cross-entropy + weight * community-contrastive

by plain gradient descent (or Adam behind config) with analytic gradients;
the contrastive term pulls together embedding pairs weighted by a
community-masked truncated-propagation proximity matrix.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .communities import CommunityPartition, partition_matrix
from .encoding import AugmentedFeatures
from .evaluation import hit_rate_at_k
from .graph import EdgeSplit, Graph, sample_nonedges
from .pairfeat import (
    CenterCache,
    FeatureConfig,
    PairFeature,
    center_distances,
    static_feature_matrix,
)
from .sketches import build_sketch

EPS_CLAMP = 1e-7
CHECKPOINT_VERSION = 1


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class ScorerConfig:
    """Shapes of the encoder and head; fixed once parameters exist."""

    in_dim: int
    layers: int = 2
    hidden_dim: int = 64
    head_hidden: int = 32
    static_dim: int = 0
    num_communities: int = 1

    def __post_init__(self):
        if self.layers < 1 or self.hidden_dim < 1 or self.head_hidden < 1:
            raise ValueError("layer counts and widths must be positive")
        if self.in_dim < 1:
            raise ValueError("encoder input width must be at least 1")


@dataclass(eq=False)
class ModelParams:
    """All trainable tensors plus frozen feature-standardization constants."""

    config: ScorerConfig
    enc_w: List[np.ndarray]
    enc_b: List[np.ndarray]
    head_w1: np.ndarray
    head_b1: np.ndarray
    head_w2: np.ndarray
    head_b2: np.ndarray
    feat_mean: np.ndarray
    feat_scale: np.ndarray
    emb_scale: float


@dataclass(eq=False)
class LossReport:
    """Composite loss decomposition for one batch or epoch."""

    ce: float
    con: float
    weight: float

    @property
    def total(self) -> float:
        return self.ce + self.weight * self.con


@dataclass(eq=False)
class ConstraintMatrix:
    """Community-masked truncated-propagation proximity, symmetric CSR."""

    matrix: sp.csr_matrix
    radius: int
    restart: float


@dataclass(frozen=True)
class TrainConfig:
    """Everything the training loop needs beyond the graph and split."""

    layers: int = 2
    hidden_dim: int = 64
    head_hidden: int = 32
    lr: float = 0.05
    epochs: int = 40
    batch_size: int = 256
    optimizer: str = "sgd"
    con_weight: float = 0.2
    temperature: float = 0.5
    anchor_batch: int = 64
    metric_k: int = 50
    seed: int = 0
    sketch_dim: int = 1024
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    use_pair_blocks: bool = True
    mask_targets: bool = True
    constraint_radius: int = 2

    def __post_init__(self):
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.lr <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("lr, epochs, batch_size must be positive")
        if self.con_weight < 0:
            raise ValueError("contrastive weight must be nonnegative")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


# ---------------------------------------------------------------------------
# parameter setup and encoder


def derive_sketch_seed(train_seed: int) -> int:
    """Sketch seed used by train(); exposed so scoring passes can rebuild
    the identical sketch instead of redrawing one."""
    child = np.random.SeedSequence(train_seed).spawn(5)[1]
    return int(np.random.default_rng(child).integers(2**32))


def encoder_input(x: Optional[np.ndarray], n: int) -> np.ndarray:
    """Encoder input matrix; featureless graphs fall back to a ones column."""
    if x is None or x.shape[1] == 0:
        return np.ones((n, 1))
    return np.asarray(x, dtype=np.float64)


def normalized_adjacency(g: Graph) -> sp.csr_matrix:
    """D^-1/2 (A + I) D^-1/2 with degrees counted after adding self loops."""
    adj = g.adjacency() + sp.identity(g.n, format="csr")
    deg = np.asarray(adj.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(deg)
    return sp.diags(inv_sqrt) @ adj @ sp.diags(inv_sqrt)


def init_params(config: ScorerConfig, seed: int = 0) -> ModelParams:
    """Deterministic scaled-normal initialization (tanh gain 5/3)."""
    rng = np.random.default_rng(seed)
    gain = 5.0 / 3.0

    def glorot(fan_in, fan_out):
        std = gain * np.sqrt(2.0 / (fan_in + fan_out))
        return rng.normal(0.0, std, size=(fan_in, fan_out))

    enc_w, enc_b = [], []
    width = config.in_dim
    for _ in range(config.layers):
        enc_w.append(glorot(width, config.hidden_dim))
        enc_b.append(np.zeros(config.hidden_dim))
        width = config.hidden_dim
    head_in = 1 + config.static_dim
    return ModelParams(
        config=config,
        enc_w=enc_w,
        enc_b=enc_b,
        head_w1=glorot(head_in, config.head_hidden),
        head_b1=np.zeros(config.head_hidden),
        head_w2=glorot(config.head_hidden, 1)[:, 0],
        head_b2=np.zeros(1),
        feat_mean=np.zeros(config.static_dim),
        feat_scale=np.ones(config.static_dim),
        emb_scale=float(np.sqrt(config.hidden_dim)),
    )


def _encoder_forward(
    ahat: sp.csr_matrix, x: np.ndarray, params: ModelParams
) -> Tuple[np.ndarray, dict]:
    """Returns final embeddings H and the per-layer cache for backprop."""
    z = x
    agg, act = [], [z]
    for w, b in zip(params.enc_w, params.enc_b):
        s = ahat @ z
        z = np.tanh(s @ w + b)
        agg.append(s)
        act.append(z)
    return z, {"agg": agg, "act": act}

def encode_nodes(g: Graph, x: Optional[np.ndarray], params: ModelParams) -> np.ndarray:
    """Embed every node; deterministic given graph, features, parameters."""
    xin = encoder_input(x, g.n)
    if xin.shape[1] != params.config.in_dim:
        raise ValueError(
            f"input width {xin.shape[1]} does not match encoder ({params.config.in_dim})"
        )
    h, _ = _encoder_forward(normalized_adjacency(g), xin, params)
    return h


def _encoder_backward(
    dh: np.ndarray, ahat: sp.csr_matrix, cache: dict, params: ModelParams
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    grads_w = [np.zeros_like(w) for w in params.enc_w]
    grads_b = [np.zeros_like(b) for b in params.enc_b]
    dz = dh
    for l in range(len(params.enc_w) - 1, -1, -1):
        dp = dz * (1.0 - cache["act"][l + 1] ** 2)
        grads_w[l] = cache["agg"][l].T @ dp
        grads_b[l] = dp.sum(axis=0)
        if l > 0:
            dz = ahat.T @ (dp @ params.enc_w[l].T)
    return grads_w, grads_b


# ---------------------------------------------------------------------------
# static feature expansion and head


def expand_static(raw: np.ndarray, num_communities: int, feature: FeatureConfig, dim: int) -> np.ndarray:
    """One-hot encode the community labels inside a raw static block.

    Raw layout is [hop-overlap | propagation | label_u, label_v, spd]; the
    labels become one-hot vectors of width ``num_communities`` each, so the
    output width is raw_width - 2 + 2 * num_communities.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape[1] == 0:
        return raw
    expected = len(feature.de_hops) ** 2 + len(feature.ppr_radii) * dim + 3
    if raw.shape[1] != expected:
        raise ValueError(f"static block width {raw.shape[1]}, expected {expected}")
    front = raw[:, :-3]
    labels_u = raw[:, -3].astype(np.int64)
    labels_v = raw[:, -2].astype(np.int64)
    spd = raw[:, -1:]
    eye = np.eye(num_communities)
    return np.concatenate([front, eye[labels_u], eye[labels_v], spd], axis=1)


def expanded_static_dim(feature: FeatureConfig, dim: int, num_communities: int, use_pair_blocks: bool = True) -> int:
    if not use_pair_blocks:
        return 0
    return len(feature.de_hops) ** 2 + len(feature.ppr_radii) * dim + 2 * num_communities + 1


def _head_forward(params: ModelParams, inputs: np.ndarray) -> Tuple[np.ndarray, dict]:
    a1 = inputs @ params.head_w1 + params.head_b1
    z1 = np.tanh(a1)
    logit = z1 @ params.head_w2 + params.head_b2[0]
    prob = 1.0 / (1.0 + np.exp(-logit))
    return prob, {"inputs": inputs, "z1": z1, "logit": logit, "prob": prob}


def _assemble_inputs(
    params: ModelParams, h: np.ndarray, pairs: np.ndarray, static: np.ndarray
) -> np.ndarray:
    us, vs = pairs[:, 0], pairs[:, 1]
    emb_dot = np.sum(h[us] * h[vs], axis=1) / params.emb_scale
    if static.shape[1] == 0:
        return emb_dot[:, None]
    std = (static - params.feat_mean) / params.feat_scale
    return np.concatenate([emb_dot[:, None], std], axis=1)


def score_pair(feat: PairFeature, params: ModelParams) -> float:
    """Head probability for a single assembled pair feature."""
    cfg = params.config
    if cfg.static_dim == 0:
        inputs = np.array([[feat.emb_dot / params.emb_scale]])
    else:
        raw = np.concatenate([feat.de, feat.path, feat.com])[None, :]
        k = cfg.num_communities
        n_front = raw.shape[1] - 3
        eye = np.eye(k)
        expanded = np.concatenate(
            [
                raw[:, :n_front],
                eye[raw[:, -3].astype(np.int64)],
                eye[raw[:, -2].astype(np.int64)],
                raw[:, -1:],
            ],
            axis=1,
        )
        std = (expanded - params.feat_mean) / params.feat_scale
        inputs = np.concatenate([[[feat.emb_dot / params.emb_scale]], std], axis=1)
    prob, _ = _head_forward(params, inputs)
    return float(prob[0])


# ---------------------------------------------------------------------------
# losses


def loss_ce(preds, labels) -> float:
    """Mean binary cross-entropy with predictions clamped away from 0 and 1."""
    p = np.clip(np.asarray(preds, dtype=np.float64), EPS_CLAMP, 1.0 - EPS_CLAMP)
    y = np.asarray(labels, dtype=np.float64)
    if p.shape != y.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {y.shape}")
    if p.size == 0:
        raise ValueError("empty prediction batch")
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _contrastive(
    h: np.ndarray,
    m: sp.spmatrix,
    tau: float,
    anchors: np.ndarray,
    want_grad: bool,
) -> Tuple[float, Optional[np.ndarray]]:
    """Value and (optionally) dL/dH of the contrastive sum over anchors."""
    anchors = np.asarray(anchors, dtype=np.int64)
    b = anchors.size
    if b < 2:
        return 0.0, (np.zeros_like(h) if want_grad else None)
    u = h[anchors]
    norms = np.linalg.norm(u, axis=1)
    if np.any(norms == 0.0):
        bad = anchors[norms == 0.0][0]
        raise ValueError(f"zero-norm embedding for anchor node {bad}")
    uhat = u / norms[:, None]
    cos = uhat @ uhat.T
    w = np.asarray(m.tocsr()[anchors][:, anchors].todense(), dtype=np.float64)
    np.fill_diagonal(w, 0.0)
    if not w.any():
        return 0.0, (np.zeros_like(h) if want_grad else None)
    scaled = cos / tau
    np.fill_diagonal(scaled, -np.inf)  # exclude self from the denominator
    mx = scaled.max(axis=1)
    exps = np.exp(scaled - mx[:, None])
    np.fill_diagonal(exps, 0.0)
    lse = mx + np.log(exps.sum(axis=1))
    value = float(np.sum(w * (lse[:, None] - cos / tau)))
    if not want_grad:
        return value, None
    softmax = exps / exps.sum(axis=1, keepdims=True)
    row_w = w.sum(axis=1)
    g_cos = (row_w[:, None] * softmax - w) / tau
    np.fill_diagonal(g_cos, 0.0)
    duhat = (g_cos + g_cos.T) @ uhat
    du = (duhat - np.sum(duhat * uhat, axis=1, keepdims=True) * uhat) / norms[:, None]
    dh = np.zeros_like(h)
    dh[anchors] = du
    return value, dh


def loss_con(
    h: np.ndarray,
    m: ConstraintMatrix | sp.spmatrix,
    tau: float,
    anchors: Optional[Sequence[int]] = None,
) -> float:
    """Community-contrastive loss over an anchor batch (default: all nodes).

    For each ordered anchor pair (i, j), i != j, the proximity weight
    M[i, j] multiplies the negative log-softmax of cos(h_i, h_j)/tau
    against all other anchors in the batch.
    """
    mat = m.matrix if isinstance(m, ConstraintMatrix) else m
    if anchors is None:
        anchors = np.arange(h.shape[0])
    value, _ = _contrastive(h, mat, tau, np.asarray(anchors), want_grad=False)
    return value


def build_constraint(
    p: CommunityPartition,
    g: Graph,
    radius: int = 2,
    restart: float = 0.15,
) -> ConstraintMatrix:
    """Proximity matrix (S S^T) o truncated-propagation, symmetrized.

    The propagation term is sum_{k=0..radius} restart*(1-restart)^k A^k,
    evaluated exactly; masking by the one-hot community matrix S zeroes
    every cross-community entry, so the diagonal keeps at least ``restart``.
    """
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    if not (0.0 < restart <= 1.0):
        raise ValueError(f"restart must lie in (0, 1], got {restart}")
    adj = g.adjacency()
    acc = sp.identity(g.n, format="csr") * restart
    power = sp.identity(g.n, format="csr")
    for k in range(1, radius + 1):
        power = power @ adj
        acc = acc + restart * (1.0 - restart) ** k * power
    acc = acc.tocoo()
    same = p.assignment[acc.row] == p.assignment[acc.col]
    masked = sp.coo_matrix(
        (acc.data[same], (acc.row[same], acc.col[same])), shape=acc.shape
    ).tocsr()
    sym = (masked + masked.T) * 0.5
    return ConstraintMatrix(matrix=sym.tocsr(), radius=radius, restart=restart)


# ---------------------------------------------------------------------------
# combined loss and analytic gradient


def loss_and_grad(
    params: ModelParams,
    ahat: sp.csr_matrix,
    x: np.ndarray,
    pairs: np.ndarray,
    labels: np.ndarray,
    static: np.ndarray,
    constraint: Optional[ConstraintMatrix] = None,
    anchors: Optional[np.ndarray] = None,
    con_weight: float = 0.0,
    temperature: float = 0.5,
    want_grad: bool = True,
) -> Tuple[LossReport, Optional[Dict[str, list]]]:
    """Composite loss and, optionally, gradients for every parameter tensor.

    ``static`` carries the already-expanded pair features (may have zero
    columns).  The contrastive term is active only when ``con_weight`` is
    positive and both a constraint matrix and anchors are supplied.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    labels = np.asarray(labels, dtype=np.float64)
    h, cache = _encoder_forward(ahat, x, params)
    inputs = _assemble_inputs(params, h, pairs, static)
    prob, head_cache = _head_forward(params, inputs)
    ce = loss_ce(prob, labels)
    use_con = con_weight > 0.0 and constraint is not None and anchors is not None
    if use_con:
        con, dh_con = _contrastive(
            h, constraint.matrix, temperature, anchors, want_grad
        )
    else:
        con, dh_con = 0.0, None
    report = LossReport(ce=ce, con=con, weight=con_weight if use_con else 0.0)
    if not want_grad:
        return report, None
    b = len(pairs)
    inside = (prob > EPS_CLAMP) & (prob < 1.0 - EPS_CLAMP)
    dlogit = np.where(inside, prob - labels, 0.0) / b
    z1 = head_cache["z1"]
    d_w2 = z1.T @ dlogit
    d_b2 = np.array([dlogit.sum()])
    dz1 = np.outer(dlogit, params.head_w2)
    da1 = dz1 * (1.0 - z1 ** 2)
    d_w1 = inputs.T @ da1
    d_b1 = da1.sum(axis=0)
    d_inputs = da1 @ params.head_w1.T
    d_emb = d_inputs[:, 0] / params.emb_scale
    dh = np.zeros_like(h)
    us, vs = pairs[:, 0], pairs[:, 1]
    np.add.at(dh, us, d_emb[:, None] * h[vs])
    np.add.at(dh, vs, d_emb[:, None] * h[us])
    if use_con and dh_con is not None:
        dh = dh + con_weight * dh_con
    d_enc_w, d_enc_b = _encoder_backward(dh, ahat, cache, params)
    grads = {
        "enc_w": d_enc_w,
        "enc_b": d_enc_b,
        "head_w1": d_w1,
        "head_b1": d_b1,
        "head_w2": d_w2,
        "head_b2": d_b2,
    }
    return report, grads


def predict_probs(
    params: ModelParams,
    ahat: sp.csr_matrix,
    x: np.ndarray,
    pairs: np.ndarray,
    static: np.ndarray,
) -> np.ndarray:
    """Forward-only probabilities for a batch of pairs."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        return np.empty(0)
    h, _ = _encoder_forward(ahat, x, params)
    prob, _ = _head_forward(params, _assemble_inputs(params, h, pairs, static))
    return prob


# ---------------------------------------------------------------------------
# training loop


def _flat_params(params: ModelParams) -> list:
    return (
        list(params.enc_w)
        + list(params.enc_b)
        + [params.head_w1, params.head_b1, params.head_w2, params.head_b2]
    )


def _flat_grads(grads: dict) -> list:
    return (
        list(grads["enc_w"])
        + list(grads["enc_b"])
        + [grads["head_w1"], grads["head_b1"], grads["head_w2"], grads["head_b2"]]
    )


class _Optimizer:
    """Plain fixed-rate descent, or Adam when configured."""

    def __init__(self, kind: str, lr: float, shapes: list):
        self.kind = kind
        self.lr = lr
        self.t = 0
        if kind == "adam":
            self.m = [np.zeros(s) for s in shapes]
            self.v = [np.zeros(s) for s in shapes]

    def step(self, tensors: list, grads: list) -> None:
        self.t += 1
        if self.kind == "sgd":
            for p, gr in zip(tensors, grads):
                p -= self.lr * gr
            return
        b1, b2, eps = 0.9, 0.999, 1e-8
        for i, (p, gr) in enumerate(zip(tensors, grads)):
            self.m[i] = b1 * self.m[i] + (1 - b1) * gr
            self.v[i] = b2 * self.v[i] + (1 - b2) * gr ** 2
            mhat = self.m[i] / (1 - b1 ** self.t)
            vhat = self.v[i] / (1 - b2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + eps)


def train(
    g: Graph,
    split: EdgeSplit,
    features: AugmentedFeatures | np.ndarray | None,
    partition: CommunityPartition,
    config: TrainConfig,
    constraint: Optional[ConstraintMatrix] = None,
    on_epoch: Optional[Callable[[int, LossReport, float], None]] = None,
) -> ModelParams:
    """Fit the scorer on the training edges of ``g``.

    Each epoch resamples one uniform non-edge negative per positive,
    shuffles, and walks mini-batches; the contrastive term draws a fresh
    anchor batch per step from a dedicated random stream, so runs with
    ``con_weight = 0`` consume identical randomness for everything else.
    Returns the parameters with the best validation hit rate.

    Raises TrainingDiverged if the loss stops being finite.
    """
    x = features.matrix if isinstance(features, AugmentedFeatures) else features
    xin = encoder_input(x, g.n)
    seeds = np.random.SeedSequence(config.seed).spawn(5)
    rng_init, _, rng_neg, rng_shuffle, rng_anchor = (
        np.random.default_rng(s) for s in seeds
    )
    sketch = build_sketch(
        g,
        config.sketch_dim,
        config.feature.max_hop,
        seed=derive_sketch_seed(config.seed),
    )
    cache = center_distances(g, partition)
    scfg = ScorerConfig(
        in_dim=xin.shape[1],
        layers=config.layers,
        hidden_dim=config.hidden_dim,
        head_hidden=config.head_hidden,
        static_dim=expanded_static_dim(
            config.feature, config.sketch_dim, partition.k, config.use_pair_blocks
        ),
        num_communities=partition.k,
    )
    params = init_params(scfg, seed=int(rng_init.integers(2**32)))
    ahat = normalized_adjacency(g)

    def static_for(pairs: np.ndarray, mask: bool) -> np.ndarray:
        if not config.use_pair_blocks:
            return np.empty((len(pairs), 0))
        raw = static_feature_matrix(
            g, sketch, partition, pairs, config.feature, mask_targets=mask, cache=cache
        )
        return expand_static(raw, partition.k, config.feature, config.sketch_dim)

    pos_pairs = np.asarray(split.train_edges, dtype=np.int64)
    if len(pos_pairs) == 0:
        raise ValueError("empty training edge set")
    static_pos = static_for(pos_pairs, config.mask_targets)
    if scfg.static_dim > 0:
        std = static_pos.std(axis=0)
        params.feat_mean = static_pos.mean(axis=0)
        # columns constant across positives (e.g. one-hot labels) keep unit scale
        params.feat_scale = np.where(std > 1e-8, std, 1.0)
    if config.con_weight > 0.0 and constraint is None:
        constraint = build_constraint(
            partition, g, radius=config.constraint_radius, restart=config.feature.restart
        )
    forbidden = {
        (int(a), int(b))
        for arr in (split.train_edges, split.valid_edges, split.test_edges)
        for a, b in arr
    }
    has_valid = len(split.valid_edges) > 0 and len(split.valid_neg) > 0
    if has_valid:
        static_vpos = static_for(split.valid_edges, False)
        static_vneg = static_for(split.valid_neg, False)
    opt = _Optimizer(config.optimizer, config.lr, [p.shape for p in _flat_params(params)])
    best_params = copy.deepcopy(params)
    best_hr = -np.inf
    n_pos = len(pos_pairs)
    labels_template = np.concatenate([np.ones(n_pos), np.zeros(n_pos)])
    for epoch in range(config.epochs):
        negs = sample_nonedges(g, n_pos, rng_neg, forbidden=forbidden)
        static_neg = static_for(negs, False)
        all_pairs = np.concatenate([pos_pairs, negs], axis=0)
        all_static = np.concatenate([static_pos, static_neg], axis=0)
        labels = labels_template[: len(all_pairs)]
        perm = rng_shuffle.permutation(len(all_pairs))
        ce_sum, con_sum, seen, steps = 0.0, 0.0, 0, 0
        for start in range(0, len(perm), config.batch_size):
            idx = perm[start:start + config.batch_size]
            anchors = None
            if config.con_weight > 0.0:
                anchors = rng_anchor.choice(
                    g.n, size=min(config.anchor_batch, g.n), replace=False
                )
            report, grads = loss_and_grad(
                params,
                ahat,
                xin,
                all_pairs[idx],
                labels[idx],
                all_static[idx],
                constraint=constraint,
                anchors=anchors,
                con_weight=config.con_weight,
                temperature=config.temperature,
            )
            if not np.isfinite(report.total):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}: ce={report.ce}, con={report.con}"
                )
            opt.step(_flat_params(params), _flat_grads(grads))
            ce_sum += report.ce * len(idx)
            con_sum += report.con
            seen += len(idx)
            steps += 1
        epoch_report = LossReport(
            ce=ce_sum / max(seen, 1),
            con=con_sum / max(steps, 1),
            weight=config.con_weight,
        )
        val_hr = np.nan
        if has_valid:
            pos_scores = predict_probs(params, ahat, xin, split.valid_edges, static_vpos)
            neg_scores = predict_probs(params, ahat, xin, split.valid_neg, static_vneg)
            val_hr = hit_rate_at_k(pos_scores, neg_scores, config.metric_k)
            if val_hr > best_hr:
                best_hr = val_hr
                best_params = copy.deepcopy(params)
        if on_epoch is not None:
            on_epoch(epoch, epoch_report, val_hr)
    if not has_valid or not np.isfinite(best_hr):
        return params
    return best_params


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(params: ModelParams, path) -> None:
    cfg = params.config
    payload = {
        "version": np.array(CHECKPOINT_VERSION),
        "config_json": np.array(
            json.dumps(
                {
                    "in_dim": cfg.in_dim,
                    "layers": cfg.layers,
                    "hidden_dim": cfg.hidden_dim,
                    "head_hidden": cfg.head_hidden,
                    "static_dim": cfg.static_dim,
                    "num_communities": cfg.num_communities,
                },
                sort_keys=True,
            )
        ),
        "head_w1": params.head_w1,
        "head_b1": params.head_b1,
        "head_w2": params.head_w2,
        "head_b2": params.head_b2,
        "feat_mean": params.feat_mean,
        "feat_scale": params.feat_scale,
        "emb_scale": np.array(params.emb_scale),
    }
    for i, (w, b) in enumerate(zip(params.enc_w, params.enc_b)):
        payload[f"enc_w_{i}"] = w
        payload[f"enc_b_{i}"] = b
    np.savez(path, **payload)


def load_checkpoint(path) -> ModelParams:
    data = np.load(path, allow_pickle=False)
    version = int(data["version"])
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    cfg = ScorerConfig(**json.loads(str(data["config_json"])))
    enc_w, enc_b = [], []
    for i in range(cfg.layers):
        enc_w.append(data[f"enc_w_{i}"])
        enc_b.append(data[f"enc_b_{i}"])
    return ModelParams(
        config=cfg,
        enc_w=enc_w,
        enc_b=enc_b,
        head_w1=data["head_w1"],
        head_b1=data["head_b1"],
        head_w2=data["head_w2"],
        head_b2=data["head_b2"],
        feat_mean=data["feat_mean"],
        feat_scale=data["feat_scale"],
        emb_scale=float(data["emb_scale"]),
    )
