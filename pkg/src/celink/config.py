"""Pipeline configuration: a validated flat key-value record.

Configs load from YAML mappings.  Unknown keys are rejected rather than
ignored so typos fail loudly, and numeric ranges are checked at load time.
The content hash over the effective config names run directories.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

import yaml


@dataclass(frozen=True)
class PipelineConfig:
    """Full configuration for an end-to-end run.

    Exactly one of ``edge_file`` or ``sbm`` must be set.  ``sbm`` is a
    mapping with keys block_sizes, p_in, p_out and optional delete_frac;
    its seed is derived from the run seed so sweeps stay paired.
    """

    # data
    edge_file: Optional[str] = None
    feature_file: Optional[str] = None
    sbm: Optional[dict] = None
    train_frac: float = 0.8
    valid_frac: float = 0.1
    test_frac: float = 0.1
    neg_per_pos: int = 1
    # communities and centrality
    num_communities: int = 4
    center_score: str = "pagerank"
    damping: float = 0.85
    # enhancement
    top_m: int = 100
    add_frac: float = 0.05
    remove_frac: float = 0.05
    pretrain_epochs: int = 20
    # pair features
    sketch_dim: int = 1024
    de_hops: Tuple[int, ...] = (1, 2)
    ppr_radii: Tuple[int, ...] = (1, 2)
    restart: float = 0.15
    constraint_radius: int = 2
    # scorer
    encoder_layers: int = 2
    hidden_dim: int = 64
    head_hidden: int = 32
    con_weight: float = 0.2
    temperature: float = 0.5
    anchor_batch: int = 64
    lr: float = 0.05
    epochs: int = 40
    batch_size: int = 256
    optimizer: str = "sgd"
    mask_targets: bool = True
    # ablation toggles
    use_global_encoding: bool = True
    use_enhancement: bool = True
    use_pair_blocks: bool = True
    # evaluation and bookkeeping
    metric_k: int = 50
    seed: int = 0
    out_dir: Optional[str] = "runs"

    def __post_init__(self):
        if (self.edge_file is None) == (self.sbm is None):
            raise ValueError("exactly one of edge_file or sbm must be given")
        fracs = (self.train_frac, self.valid_frac, self.test_frac)
        if any(f <= 0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must be positive and sum to 1, got {fracs}")
        positives = {
            "neg_per_pos": self.neg_per_pos,
            "num_communities": self.num_communities,
            "top_m": self.top_m,
            "sketch_dim": self.sketch_dim,
            "encoder_layers": self.encoder_layers,
            "hidden_dim": self.hidden_dim,
            "head_hidden": self.head_hidden,
            "epochs": self.epochs,
            "pretrain_epochs": self.pretrain_epochs,
            "batch_size": self.batch_size,
            "anchor_batch": self.anchor_batch,
            "metric_k": self.metric_k,
        }
        for name, value in positives.items():
            if value < 1:
                raise ValueError(f"{name} must be at least 1, got {value}")
        unit = {
            "add_frac": self.add_frac,
            "remove_frac": self.remove_frac,
            "damping": self.damping,
        }
        for name, value in unit.items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if not (0.0 < self.restart <= 1.0):
            raise ValueError(f"restart must lie in (0, 1], got {self.restart}")
        if self.con_weight < 0 or self.temperature <= 0 or self.lr <= 0:
            raise ValueError("con_weight must be >= 0; temperature and lr positive")
        if self.center_score not in ("pagerank", "degree", "betweenness", "closeness"):
            raise ValueError(f"unknown center_score {self.center_score!r}")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.sbm is not None:
            required = {"block_sizes", "p_in", "p_out"}
            allowed = required | {"delete_frac"}
            keys = set(self.sbm)
            if not required <= keys or not keys <= allowed:
                raise ValueError(
                    f"sbm mapping needs keys {sorted(required)} (optional delete_frac), got {sorted(keys)}"
                )

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["de_hops"] = list(self.de_hops)
        out["ppr_radii"] = list(self.ppr_radii)
        return out

    def replace(self, **kwargs) -> "PipelineConfig":
        return dataclasses.replace(self, **kwargs)


_FIELD_NAMES = {f.name for f in dataclasses.fields(PipelineConfig)}


def config_from_dict(data: dict) -> PipelineConfig:
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    data = dict(data)
    for key in ("de_hops", "ppr_radii"):
        if key in data:
            data[key] = tuple(int(x) for x in data[key])
    if "sbm" in data and data["sbm"] is not None:
        sbm = dict(data["sbm"])
        if "block_sizes" in sbm:
            sbm["block_sizes"] = [int(x) for x in sbm["block_sizes"]]
        data["sbm"] = sbm
    return PipelineConfig(**data)


def load_config(path) -> PipelineConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a mapping, got {type(data).__name__}")
    return config_from_dict(data)


def save_config(config: PipelineConfig, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=True)


def config_hash(config: PipelineConfig) -> str:
    """Stable short hash over the effective configuration."""
    canon = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def effective_config_text(config: PipelineConfig) -> str:
    """Human-readable echo of every effective setting, one per line."""
    lines = [f"{key} = {value!r}" for key, value in sorted(config.to_dict().items())]
    return "\n".join(lines)
