"""Benchmark the full pipeline against heuristics and its own ablations.

Four planted blocks, 80/10/10 edge split, hit rate at 50.  The trained
scorer is compared with common-neighbor style baselines and with three
single-switch ablations (no global encodings, no enhancement, no pair
feature blocks) over a shared seed list.

Usage:
    python scripts/benchmark_sbm.py            # 3 seeds, quick look
    python scripts/benchmark_sbm.py --seeds 10 # matches the acceptance run
"""
import argparse
import time

import numpy as np

from celink.config import PipelineConfig
from celink.evaluation import heuristic_scores, hit_rate_at_k
from celink.graph import training_graph
from celink.pipeline import run_pipeline

SBM = {"block_sizes": [100, 100, 100, 100], "p_in": 0.15, "p_out": 0.005}

ABLATIONS = {
    "no global encodings": {"use_global_encoding": False},
    "no enhancement": {"use_enhancement": False},
    "no pair blocks": {"use_pair_blocks": False},
}


def make_config(seed, **overrides):
    base = dict(
        sbm=SBM, num_communities=4, top_m=100,
        add_frac=0.05, remove_frac=0.05, pretrain_epochs=5,
        sketch_dim=128, de_hops=(1, 2), ppr_radii=(1, 2),
        encoder_layers=2, hidden_dim=32, head_hidden=16,
        con_weight=0.1, anchor_batch=64, lr=0.005, optimizer="adam",
        epochs=20, batch_size=256, metric_k=50, seed=seed, out_dir=None,
    )
    base.update(overrides)
    return PipelineConfig(**base)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=3, help="number of seeds")
    parser.add_argument("--k", type=int, default=50, help="ranking cutoff")
    args = parser.parse_args()

    cache = {}
    columns = ["full"] + list(ABLATIONS) + ["cn", "aa", "ra"]
    table = {name: [] for name in columns}
    t0 = time.perf_counter()
    for seed in range(args.seeds):
        full = run_pipeline(make_config(seed, metric_k=args.k), cache=cache, persist=False)
        table["full"].append(full.report.mean)
        g_train = training_graph(full.graph, full.split)
        for kind in ("cn", "aa", "ra"):
            hr = hit_rate_at_k(
                heuristic_scores(g_train, full.split.test_edges, kind),
                heuristic_scores(g_train, full.split.test_neg, kind),
                args.k,
            )
            table[kind].append(hr)
        for name, overrides in ABLATIONS.items():
            res = run_pipeline(
                make_config(seed, metric_k=args.k, **overrides),
                cache=cache, persist=False,
            )
            table[name].append(res.report.mean)
        print(f"seed {seed} done ({time.perf_counter() - t0:.0f}s)")

    width = max(len(name) for name in columns)
    print(f"\nHR@{args.k} over {args.seeds} seeds")
    print(f"{'variant':<{width}}  {'mean':>6}  {'std':>6}")
    for name in columns:
        vals = np.array(table[name])
        print(f"{name:<{width}}  {vals.mean():>6.3f}  {vals.std():>6.3f}")


if __name__ == "__main__":
    main()
