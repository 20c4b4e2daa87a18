"""Command-line interface: graph generation, sampling, reconstruction, benchmarks."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import (
    METHODS,
    BenchConfig,
    draw_sample_set,
    prepare_resources,
    run_benchmark,
)
from .dpp import SampleSet
from .graphs import SbmConfig, build_laplacian, generate_sbm, load_graph, save_graph
from .reconstruction import measure, reconstruct
from .report import emit_report, render_figure
from .spectral import partial_eigendecomposition


def _cmd_gen_graph(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if args.seed is not None:
            raw["seed"] = args.seed
        cfg = SbmConfig(**raw)
    else:
        cfg = SbmConfig(
            n_nodes=args.nodes,
            n_communities=args.communities,
            epsilon_ratio=args.epsilon_ratio,
            average_degree=args.avg_degree,
            seed=args.seed if args.seed is not None else 0,
        )
    graph = generate_sbm(cfg)
    save_graph(graph, args.out)
    print(f"wrote {graph.n_nodes} nodes, {graph.n_edges} edges to {args.out}")
    return 0


def _cmd_sample(args) -> int:
    graph = load_graph(args.graph)
    res = prepare_resources(
        graph,
        band=args.band,
        degree=args.degree,
        n_probes=args.n_probes,
        cutoff_mode=args.cutoff_mode,
        seed=args.seed,
    )
    rng = np.random.default_rng(args.seed)
    sample = draw_sample_set(args.method, res, args.size, rng)
    sample = SampleSet(sample.nodes, method=args.method, seed=args.seed)
    text = sample.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_reconstruct(args) -> int:
    graph = load_graph(args.graph)
    basis = partial_eigendecomposition(build_laplacian(graph), args.band)
    signal = np.loadtxt(args.signal).reshape(-1)
    if signal.size != graph.n_nodes:
        print(
            f"error: signal has {signal.size} values but the graph has "
            f"{graph.n_nodes} nodes",
            file=sys.stderr,
        )
        return 2
    with open(args.samples, "r", encoding="utf-8") as fh:
        sample = SampleSet.from_json(fh.read())
    meas = measure(
        signal, sample, args.noise_std, np.random.default_rng(args.seed)
    )
    recon = reconstruct(meas, basis)
    if args.out:
        np.savetxt(args.out, recon)
    err = float(np.linalg.norm(recon - signal))
    denom = float(np.linalg.norm(signal))
    rel = err / denom if denom > 0 else err
    print(f"{rel:.6e}")
    return 0


def _cmd_bench(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = BenchConfig.from_dict(raw)
    result = run_benchmark(cfg)
    emit_report(result, args.out, fmt=args.format)
    print(f"wrote report to {args.out}")
    if args.fig:
        render_figure(result, args.fig)
        print(f"wrote figure to {args.fig}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphdpp",
        description=(
            "Sample graph nodes with determinantal point processes and "
            "reconstruct bandlimited signals."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-graph", help="generate a block-model graph edge list")
    gen.add_argument("--config", help="JSON file with the block-model fields")
    gen.add_argument("--nodes", type=int, default=1000)
    gen.add_argument("--communities", type=int, default=10)
    gen.add_argument("--epsilon-ratio", type=float, default=0.25)
    gen.add_argument("--avg-degree", type=float, default=16.0)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen_graph)

    samp = sub.add_parser("sample", help="draw one sample set, printed as JSON")
    samp.add_argument("--graph", required=True, help="edge-list file")
    samp.add_argument("--method", required=True, choices=METHODS)
    samp.add_argument("--size", type=int, required=True)
    samp.add_argument("--band", type=int, default=10)
    samp.add_argument("--degree", type=int, default=50)
    samp.add_argument("--n-probes", type=int, default=None)
    samp.add_argument(
        "--cutoff-mode", choices=("exact", "estimated"), default="estimated"
    )
    samp.add_argument("--seed", type=int, default=0)
    samp.add_argument("--out", default=None)
    samp.set_defaults(func=_cmd_sample)

    rec = sub.add_parser(
        "reconstruct", help="reconstruct a signal from samples and print the error"
    )
    rec.add_argument("--graph", required=True)
    rec.add_argument("--band", type=int, default=10)
    rec.add_argument("--signal", required=True, help="text file, one value per node")
    rec.add_argument("--samples", required=True, help="sample-set JSON file")
    rec.add_argument("--noise-std", type=float, default=0.0)
    rec.add_argument("--seed", type=int, default=0)
    rec.add_argument("--out", default=None, help="write the reconstruction here")
    rec.set_defaults(func=_cmd_reconstruct)

    bench = sub.add_parser("bench", help="run the sampling comparison from a config")
    bench.add_argument("--config", required=True, help="benchmark config JSON")
    bench.add_argument("--out", required=True, help="report path")
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--fig", default=None, help="also render a figure here")
    bench.add_argument("--seed", type=int, default=None, help="override config seed")
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
