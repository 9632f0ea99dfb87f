"""Community-enhanced link prediction on undirected graphs.

The package covers the full experimental loop: fluid community detection,
centrality-based community centers, structural distance encodings,
confidence-guided edge enhancement, randomized sketch pair features, a
trainable neural scorer, heuristic baselines, and a reproducible
evaluation harness with a stochastic block model generator.
"""

from .centrality import (
    CENTRALITY_KINDS,
    CentralityScores,
    ConvergenceError,
    centrality,
    community_centers,
    pagerank,
)
from .communities import CommunityPartition, fluidc, partition_matrix
from .config import PipelineConfig, config_from_dict, load_config, save_config
from .encoding import AugmentedFeatures, StructuralEncoding, augment_features, structural_encoding
from .enhancement import (
    EnhancementPlan,
    candidate_edges,
    enhance_graph,
    pretrain_confidence,
)
from .evaluation import (
    EvalReport,
    evaluate,
    heuristic_evaluator,
    heuristic_scores,
    hit_rate_at_k,
    make_report,
)
from .graph import (
    DistanceVector,
    EdgeSplit,
    Graph,
    bfs_distances,
    build_graph,
    sample_nonedges,
    split_edges,
    training_graph,
)
from .io import load_dataset, read_edge_file, read_feature_csv
from .model import (
    ModelParams,
    ScorerConfig,
    TrainConfig,
    TrainingDiverged,
    load_checkpoint,
    predict_probs,
    save_checkpoint,
    score_pair,
    train,
)
from .pairfeat import FeatureConfig, PairFeature, pair_representation, static_feature_matrix
from .pipeline import PipelineResult, StageError, run_pipeline, sweep
from .sbm import SbmSample, SbmSpec, generate_sbm
from .sketches import QoSketch, build_sketch, de_feature, path_feature, truncated_ppr

__version__ = "0.1.0"

__all__ = [
    "AugmentedFeatures",
    "CENTRALITY_KINDS",
    "CentralityScores",
    "CommunityPartition",
    "ConvergenceError",
    "DistanceVector",
    "EdgeSplit",
    "EnhancementPlan",
    "EvalReport",
    "FeatureConfig",
    "Graph",
    "ModelParams",
    "PairFeature",
    "PipelineConfig",
    "PipelineResult",
    "QoSketch",
    "SbmSample",
    "SbmSpec",
    "ScorerConfig",
    "StageError",
    "StructuralEncoding",
    "TrainConfig",
    "TrainingDiverged",
    "augment_features",
    "bfs_distances",
    "build_graph",
    "build_sketch",
    "candidate_edges",
    "centrality",
    "community_centers",
    "config_from_dict",
    "de_feature",
    "enhance_graph",
    "evaluate",
    "fluidc",
    "generate_sbm",
    "heuristic_evaluator",
    "heuristic_scores",
    "hit_rate_at_k",
    "load_checkpoint",
    "load_config",
    "load_dataset",
    "make_report",
    "pagerank",
    "pair_representation",
    "partition_matrix",
    "path_feature",
    "predict_probs",
    "pretrain_confidence",
    "read_edge_file",
    "read_feature_csv",
    "run_pipeline",
    "sample_nonedges",
    "save_checkpoint",
    "save_config",
    "score_pair",
    "split_edges",
    "static_feature_matrix",
    "structural_encoding",
    "sweep",
    "train",
    "training_graph",
    "truncated_ppr",
]
