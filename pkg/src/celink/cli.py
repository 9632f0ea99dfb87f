"""Command-line interface for the link prediction pipeline.

Subcommands cover dataset ingestion, synthetic graph generation, the
individual pipeline stages, and full runs.  Every command exits 0 on
success and 1 with a stage-tagged message on failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .centrality import centrality, community_centers
from .communities import fluidc, save_partition_csv
from .config import (
    PipelineConfig,
    config_from_dict,
    effective_config_text,
    load_config,
)
from .enhancement import save_plan_json
from .evaluation import evaluate, heuristic_evaluator, make_report, save_report_json
from .graph import split_edges, training_graph
from .io import load_dataset, write_edge_file, write_labels_csv
from .model import save_checkpoint
from .pairfeat import FeatureConfig, center_distances, pair_representation
from .pipeline import (
    StageError,
    SWEEP_AXES,
    emit_plot_data,
    run_pipeline,
    sweep,
)
from .sbm import SbmSpec, generate_sbm
from .sketches import build_sketch

logger = logging.getLogger("celink")


def _add_config_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="YAML pipeline config")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config field (repeatable); values parse as YAML",
    )


def _load_config_with_overrides(args) -> PipelineConfig:
    import yaml

    cfg = load_config(args.config)
    if args.set:
        data = cfg.to_dict()
        for item in args.set:
            if "=" not in item:
                raise ValueError(f"override {item!r} is not KEY=VALUE")
            key, value = item.split("=", 1)
            data[key] = yaml.safe_load(value)
        cfg = config_from_dict(data)
    return cfg


def cmd_ingest(args) -> int:
    g = load_dataset(args.edges, args.features)
    print(f"loaded graph: {g.n} nodes, {g.num_edges} edges")
    if g.features is not None:
        print(f"features: {g.features.shape[1]} columns")
    if args.out:
        write_edge_file(g, args.out, header="canonical dense-id edge list")
        print(f"wrote {args.out}")
    return 0


def cmd_sbm(args) -> int:
    spec = SbmSpec(
        block_sizes=tuple(int(x) for x in args.blocks.split(",")),
        p_in=args.p_in,
        p_out=args.p_out,
        seed=args.seed,
        delete_frac=args.delete_frac,
    )
    sample = generate_sbm(spec)
    write_edge_file(sample.graph, args.out, header=f"sbm blocks={args.blocks} seed={args.seed}")
    print(f"wrote {args.out}: {sample.graph.n} nodes, {sample.graph.num_edges} edges")
    if args.labels:
        write_labels_csv(sample.labels, args.labels)
        print(f"wrote {args.labels}")
    if args.removed and len(sample.removed_edges):
        write_edge_file(sample.removed_edges, args.removed, header="deleted intra-block edges")
        print(f"wrote {args.removed} ({len(sample.removed_edges)} edges)")
    return 0


def cmd_communities(args) -> int:
    g = load_dataset(args.edges)
    partition = fluidc(g, args.k, seed=args.seed)
    save_partition_csv(partition, args.out)
    sizes = partition.sizes()
    print(f"wrote {args.out}: {args.k} communities, sizes {sizes.tolist()}")
    return 0


def cmd_enhance(args) -> int:
    cfg = _load_config_with_overrides(args)
    result = run_pipeline(cfg)
    if result.plan is None:
        print("enhancement disabled by config; nothing to write")
        return 0
    out = Path(args.out) if args.out else result.run_dir / "plan.json"
    save_plan_json(result.plan, out)
    print(
        f"wrote {out}: +{len(result.plan.added)} edges, -{len(result.plan.removed)} edges "
        f"from {len(result.plan.cand)} candidates"
    )
    return 0


def cmd_featurize(args) -> int:
    cfg = _load_config_with_overrides(args)
    result = run_pipeline(cfg, persist=False)
    g = training_graph(result.graph, result.split)
    fc = FeatureConfig(
        de_hops=cfg.de_hops, ppr_radii=cfg.ppr_radii, restart=cfg.restart
    )
    sketch = build_sketch(g, cfg.sketch_dim, fc.max_hop, seed=cfg.seed)
    cache = center_distances(g, result.partition)
    pairs = [tuple(int(x) for x in p.split(",")) for p in args.pairs.split(";")]
    rows = []
    for u, v in pairs:
        feat = pair_representation(
            g, sketch, None, result.partition, u, v, fc,
            mask_target=args.mask, cache=cache,
        )
        rows.append(feat.vector())
    np.savetxt(args.out, np.array(rows), delimiter=",")
    print(f"wrote {args.out}: {len(rows)} rows, {rows[0].size} columns")
    return 0


def cmd_train(args) -> int:
    cfg = _load_config_with_overrides(args)
    result = run_pipeline(cfg)
    out = Path(args.out) if args.out else result.run_dir / "checkpoint.npz"
    save_checkpoint(result.params, out)
    print(f"wrote {out}")
    print(f"test {result.report.metric}: {result.report.mean:.4f}")
    return 0


def cmd_eval(args) -> int:
    cfg = _load_config_with_overrides(args)
    if args.heuristic:
        result = run_pipeline(cfg, persist=False)
        g = training_graph(result.graph, result.split)
        scorer = heuristic_evaluator(g, args.heuristic)
        report = evaluate(scorer, result.split, cfg.metric_k, seeds=(cfg.seed,))
        report.config["method"] = args.heuristic
    else:
        result = run_pipeline(cfg)
        report = result.report
    if args.out:
        save_report_json(report, args.out)
        print(f"wrote {args.out}")
    print(json.dumps({"metric": report.metric, "mean": report.mean, "std": report.std}))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config_with_overrides(args)
    values = [float(v) if "." in v or "e" in v.lower() else int(v) for v in args.values.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    results = sweep(args.axis, values, cfg, seeds=seeds)
    emit_plot_data(results, args.out)
    print(f"wrote {args.out}")
    for value, report in results:
        print(f"{args.axis}={value}: {report.mean:.4f} +- {report.std:.4f}")
    return 0


def cmd_pipeline(args) -> int:
    cfg = _load_config_with_overrides(args)
    if args.echo:
        print(effective_config_text(cfg))
    result = run_pipeline(cfg)
    print(f"run dir: {result.run_dir}")
    print(f"test {result.report.metric}: {result.report.mean:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="celink", description="community-enhanced link prediction pipeline"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate an edge-list dataset")
    p.add_argument("--edges", required=True)
    p.add_argument("--features")
    p.add_argument("--out", help="write canonical dense-id edge list here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sbm", help="generate a stochastic block model graph")
    p.add_argument("--blocks", required=True, help="comma-separated block sizes")
    p.add_argument("--p-in", type=float, required=True, dest="p_in")
    p.add_argument("--p-out", type=float, required=True, dest="p_out")
    p.add_argument("--delete-frac", type=float, default=0.0, dest="delete_frac")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--labels", help="write planted block labels CSV here")
    p.add_argument("--removed", help="write deleted intra-block edges here")
    p.set_defaults(func=cmd_sbm)

    p = sub.add_parser("communities", help="run fluid community detection")
    p.add_argument("--edges", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("enhance", help="run through enhancement, save the plan")
    _add_config_arg(p)
    p.add_argument("--out", help="plan JSON path (default: run dir)")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("featurize", help="dump pair feature vectors as CSV")
    _add_config_arg(p)
    p.add_argument("--pairs", required=True, help="semicolon-separated u,v pairs")
    p.add_argument("--mask", action="store_true", help="mask target edges")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train the scorer, save a checkpoint")
    _add_config_arg(p)
    p.add_argument("--out", help="checkpoint path (default: run dir)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate the pipeline or a heuristic")
    _add_config_arg(p)
    p.add_argument("--heuristic", choices=("cn", "aa", "ra"))
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="sweep one config axis over values")
    _add_config_arg(p)
    p.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES))
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seeds", default="0,1,2", help="comma-separated seeds")
    p.add_argument("--out", required=True, help="plot-data CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pipeline", help="run the full pipeline end to end")
    _add_config_arg(p)
    p.add_argument("--echo", action="store_true", help="print the effective config")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error in {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
