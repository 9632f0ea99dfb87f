"""Sweep the edge-addition fraction and write plot-ready CSV.

Runs the pipeline with the addition budget varied over a grid while
everything else stays fixed, sharing cached stages across values, and
writes (axis, value, mean, std) rows for plotting.

Usage:
    python scripts/sweep_enhancement.py --out gamma_sweep.csv
    python scripts/sweep_enhancement.py --axis eta --values 0 0.05 0.1
"""
import argparse

from celink.config import PipelineConfig
from celink.pipeline import emit_plot_data, sweep

SBM = {"block_sizes": [50, 50, 50, 50], "p_in": 0.2, "p_out": 0.01}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--axis", default="gamma", help="sweep axis name")
    parser.add_argument(
        "--values", type=float, nargs="+", default=[0.0, 0.05, 0.1, 0.25]
    )
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--out", default="sweep.csv", help="output CSV path")
    args = parser.parse_args()

    base = PipelineConfig(
        sbm=SBM, num_communities=4, top_m=50,
        pretrain_epochs=5, sketch_dim=64,
        encoder_layers=2, hidden_dim=32, head_hidden=16,
        con_weight=0.1, lr=0.01, optimizer="adam",
        epochs=15, batch_size=256, metric_k=20, out_dir=None,
    )
    results = sweep(
        args.axis, args.values, base, seeds=tuple(range(args.seeds)), cache={}
    )
    for value, report in results:
        print(f"{args.axis}={value}: HR@{base.metric_k} {report.mean:.3f} +- {report.std:.3f}")
    emit_plot_data(results, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
