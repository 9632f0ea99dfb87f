"""End-to-end pipeline: data, communities, enhancement, training, evaluation.

Stages run in a fixed order and publish their outputs both in memory (the
returned PipelineResult) and as artifacts under a run directory named by
the config hash and seed.  An optional shared cache keyed by stage inputs
lets parameter sweeps reuse everything upstream of the swept field.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .centrality import (
    CentralityScores,
    centrality,
    community_centers,
    save_scores_csv,
)
from .communities import CommunityPartition, fluidc, save_partition_csv
from .config import PipelineConfig, config_hash, effective_config_text, save_config
from .encoding import augment_features, save_encoding_csv, structural_encoding
from .enhancement import (
    EnhancementPlan,
    enhance_graph,
    pretrain_confidence,
    save_plan_json,
)
from .evaluation import EvalReport, hit_rate_at_k, make_report, save_report_json
from .graph import EdgeSplit, Graph, split_edges, training_graph
from .io import load_dataset
from .model import (
    ModelParams,
    TrainConfig,
    derive_sketch_seed,
    encoder_input,
    expand_static,
    normalized_adjacency,
    predict_probs,
    save_checkpoint,
    train,
)
from .pairfeat import FeatureConfig, center_distances, static_feature_matrix
from .sbm import SbmSpec, generate_sbm
from .sketches import build_sketch

logger = logging.getLogger(__name__)

STAGES = (
    "data",
    "communities",
    "centrality",
    "encoding",
    "confidence",
    "enhance",
    "train",
    "evaluate",
)

SWEEP_AXES = {
    "K": "num_communities",
    "gamma": "add_frac",
    "eta": "remove_frac",
    "alpha": "con_weight",
    "layers": "encoder_layers",
}


class StageError(RuntimeError):
    """Failure wrapped with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r}: {cause}")


@dataclass(eq=False)
class PipelineResult:
    config: PipelineConfig
    graph: Graph
    split: EdgeSplit
    partition: CommunityPartition
    scores: CentralityScores
    plan: Optional[EnhancementPlan]
    params: ModelParams
    report: EvalReport
    run_dir: Optional[Path]


def _derived_seeds(seed: int) -> Dict[str, int]:
    children = np.random.SeedSequence(seed).spawn(5)
    names = ("sbm", "split", "communities", "pretrain", "train")
    return {
        name: int(np.random.default_rng(child).integers(2**31))
        for name, child in zip(names, children)
    }


def _feature_config(config: PipelineConfig) -> FeatureConfig:
    return FeatureConfig(
        de_hops=config.de_hops,
        ppr_radii=config.ppr_radii,
        restart=config.restart,
    )


def _train_config(config: PipelineConfig, seed: int, epochs: int) -> TrainConfig:
    return TrainConfig(
        layers=config.encoder_layers,
        hidden_dim=config.hidden_dim,
        head_hidden=config.head_hidden,
        lr=config.lr,
        epochs=epochs,
        batch_size=config.batch_size,
        optimizer=config.optimizer,
        con_weight=config.con_weight,
        temperature=config.temperature,
        anchor_batch=config.anchor_batch,
        metric_k=config.metric_k,
        seed=seed,
        sketch_dim=config.sketch_dim,
        feature=_feature_config(config),
        use_pair_blocks=config.use_pair_blocks,
        mask_targets=config.mask_targets,
        constraint_radius=config.constraint_radius,
    )


def _cached(cache: Optional[dict], key: tuple, compute):
    if cache is None:
        return compute()
    if key not in cache:
        cache[key] = compute()
    return cache[key]


def run_pipeline(
    config: PipelineConfig,
    cache: Optional[dict] = None,
    persist: bool = True,
) -> PipelineResult:
    """Run every stage and return the evaluation report plus artifacts.

    ``cache`` may be shared across calls (e.g. within a sweep); entries are
    keyed by the stage inputs, so only stages downstream of a changed
    setting recompute.  ``persist=False`` skips writing the run directory.
    """
    logger.info("effective config:\n%s", effective_config_text(config))
    seeds = _derived_seeds(config.seed)
    fc = _feature_config(config)

    stage = "data"
    try:
        data_key = (
            stage,
            config.edge_file,
            config.feature_file,
            json.dumps(config.sbm, sort_keys=True),
            config.train_frac,
            config.valid_frac,
            config.test_frac,
            config.neg_per_pos,
            config.seed,
        )

        def load_data():
            if config.sbm is not None:
                spec = SbmSpec(
                    block_sizes=tuple(config.sbm["block_sizes"]),
                    p_in=float(config.sbm["p_in"]),
                    p_out=float(config.sbm["p_out"]),
                    seed=seeds["sbm"],
                    delete_frac=float(config.sbm.get("delete_frac", 0.0)),
                )
                g = generate_sbm(spec).graph
            else:
                g = load_dataset(config.edge_file, config.feature_file)
            split = split_edges(
                g,
                (config.train_frac, config.valid_frac, config.test_frac),
                seed=seeds["split"],
                neg_per_pos=config.neg_per_pos,
            )
            return g, split, training_graph(g, split)

        g_full, split, g_train = _cached(cache, data_key, load_data)

        stage = "communities"
        comm_key = (stage, data_key, config.num_communities)
        partition = _cached(
            cache,
            comm_key,
            lambda: fluidc(g_train, config.num_communities, seed=seeds["communities"]),
        )

        stage = "centrality"
        cent_key = (stage, comm_key, config.center_score)

        def compute_centrality():
            scores = centrality(g_train, config.center_score)
            return scores, community_centers(g_train, partition, scores)

        scores, partition = _cached(cache, cent_key, compute_centrality)

        stage = "encoding"
        enc_key = (stage, cent_key, config.use_global_encoding)

        def compute_encoding():
            if not config.use_global_encoding:
                return None, g_train.features
            enc = structural_encoding(g_train, partition)
            return enc, augment_features(g_train.features, enc).matrix

        encoding, node_features = _cached(cache, enc_key, compute_encoding)

        stage = "confidence"
        do_enhance = config.use_enhancement and (
            config.add_frac > 0.0 or config.remove_frac > 0.0
        )
        confidence = None
        if do_enhance:
            conf_key = (
                stage,
                enc_key,
                config.top_m,
                config.pretrain_epochs,
                config.sketch_dim,
                config.de_hops,
                config.ppr_radii,
                config.restart,
                config.encoder_layers,
                config.hidden_dim,
                config.head_hidden,
                config.lr,
                config.batch_size,
                config.optimizer,
                config.con_weight,
                config.temperature,
                config.anchor_batch,
                config.mask_targets,
                config.use_pair_blocks,
            )
            confidence = _cached(
                cache,
                conf_key,
                lambda: pretrain_confidence(
                    g_train,
                    split,
                    _train_config(config, seeds["pretrain"], config.pretrain_epochs),
                    num_communities=config.num_communities,
                    top_m=config.top_m,
                    partition=partition,
                    scores=scores,
                    features=node_features,
                ),
            )

        stage = "enhance"
        if do_enhance:
            g_work, plan = enhance_graph(
                g_train,
                confidence.cand,
                confidence.prob,
                config.add_frac,
                config.remove_frac,
                top_m=config.top_m,
            )
        else:
            g_work, plan = g_train, None

        stage = "train"
        train_cfg = _train_config(config, seeds["train"], config.epochs)
        params = train(g_work, split, node_features, partition, train_cfg)

        stage = "evaluate"
        sketch = build_sketch(
            g_work, config.sketch_dim, fc.max_hop, seed=derive_sketch_seed(train_cfg.seed)
        )
        cache_cd = center_distances(g_work, partition)
        xin = encoder_input(node_features, g_work.n)
        ahat = normalized_adjacency(g_work)

        def score(pairs: np.ndarray) -> np.ndarray:
            if len(pairs) == 0:
                return np.empty(0)
            if config.use_pair_blocks:
                raw = static_feature_matrix(
                    g_work, sketch, partition, pairs, fc, mask_targets=False, cache=cache_cd
                )
                static = expand_static(raw, partition.k, fc, config.sketch_dim)
            else:
                static = np.empty((len(pairs), 0))
            return predict_probs(params, ahat, xin, pairs, static)

        hr = hit_rate_at_k(
            score(split.test_edges), score(split.test_neg), config.metric_k
        )
        report = make_report(
            f"HR@{config.metric_k}", config.metric_k, [hr], config.to_dict()
        )
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc

    run_dir = None
    if persist and config.out_dir is not None:
        run_dir = Path(config.out_dir) / f"{config_hash(config)}-s{config.seed}"
        run_dir.mkdir(parents=True, exist_ok=True)
        save_config(config, run_dir / "config.yaml")
        save_partition_csv(partition, run_dir / "partition.csv")
        save_scores_csv(scores, run_dir / "centrality.csv")
        if encoding is not None:
            save_encoding_csv(encoding, run_dir / "encoding.csv")
        if plan is not None:
            save_plan_json(plan, run_dir / "plan.json")
        save_checkpoint(params, run_dir / "checkpoint.npz")
        save_report_json(report, run_dir / "report.json")
    return PipelineResult(
        config=config,
        graph=g_full,
        split=split,
        partition=partition,
        scores=scores,
        plan=plan,
        params=params,
        report=report,
        run_dir=run_dir,
    )


def sweep(
    axis: str,
    values: Sequence,
    base_config: PipelineConfig,
    seeds: Sequence[int] = (0, 1, 2),
    cache: Optional[dict] = None,
    persist: bool = False,
) -> List[Tuple[float, EvalReport]]:
    """Vary one config field over ``values`` with shared seeds per value.

    Every value is evaluated with the identical seed list, so comparisons
    are paired.  Returns (value, aggregated report) tuples in input order.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {sorted(SWEEP_AXES)}")
    field_name = SWEEP_AXES[axis]
    cache = {} if cache is None else cache
    out: List[Tuple[float, EvalReport]] = []
    for value in values:
        runs = []
        for seed in seeds:
            cfg = base_config.replace(**{field_name: value, "seed": int(seed)})
            result = run_pipeline(cfg, cache=cache, persist=persist)
            runs.append(result.report.mean)
        report = make_report(
            f"HR@{base_config.metric_k}",
            base_config.metric_k,
            runs,
            {
                "sweep_axis": axis,
                "sweep_value": value,
                "seeds": [int(s) for s in seeds],
            },
        )
        out.append((value, report))
    return out


def emit_plot_data(results: Sequence[Tuple[float, EvalReport]], path) -> None:
    """Write sweep results as CSV rows (axis, value, mean, std)."""
    results = list(results)
    if not results:
        raise ValueError("no sweep results to write")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis", "value", "mean", "std"])
        for value, report in results:
            axis = report.config.get("sweep_axis", "")
            writer.writerow([axis, value, repr(report.mean), repr(report.std)])
