"""Command-line entry points.

Every command is a thin wrapper over the library; module errors exit with
code 1 and a one-line diagnostic, usage errors with the usual code 2.
Each ``project`` run writes a manifest sufficient to reproduce it bit for
bit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import (MODES, geodesic_distances, hierarchical_cluster,
                      tendency_gap)
from .data import (load_dataset, load_dissimilarity, euclidean_dissimilarity,
                   save_dataset, save_dissimilarity)
from .datasets import GENERATOR_NAMES, generate_benchmark
from .engine import PROJECTION_FORMAT_VERSION, Projection, swarm_project
from .errors import SwarmMapError
from .evaluate import (BenchmarkSuite, best_permutation_accuracy, f1_score,
                       run_benchmark)
from .topomap import delaunay_torus, detect_volcanoes, render_heightmap, u_heights

PROJECTION_FILE = "projection.json"
MATRIX_FILE = "dissimilarity.csv"
LABELS_FILE = "labels.json"
MANIFEST_FILE = "manifest.json"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def cmd_generate(args) -> int:
    ds = generate_benchmark(args.name, seed=args.seed, n_points=args.size)
    save_dataset(ds, args.out)
    print(f"wrote {ds.n} points ({ds.dim} features) to {args.out}")
    return 0


def cmd_project(args) -> int:
    src = Path(args.input)
    if args.matrix:
        dmatrix = load_dissimilarity(src)
        labels = None
    else:
        ds = load_dataset(src)
        labels = ds.labels
        dmatrix = euclidean_dissimilarity(ds)
    t0 = time.perf_counter()
    proj = swarm_project(dmatrix, args.seed, alpha=args.alpha, beta=args.beta)
    runtime = time.perf_counter() - t0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    proj.save(out / PROJECTION_FILE)
    save_dissimilarity(dmatrix, out / MATRIX_FILE)
    if labels is not None:
        (out / LABELS_FILE).write_text(json.dumps([int(v) for v in labels]) + "\n")
    manifest = {
        "input_path": str(src),
        "input_sha256": _sha256(src),
        "seed": args.seed,
        "grid": proj.grid.to_dict(),
        "package_version": __version__,
        "projection_format_version": PROJECTION_FORMAT_VERSION,
        "runtime_s": runtime,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "command": " ".join(sys.argv),
    }
    (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    g = proj.grid
    print(f"projected {proj.n} points onto a {g.lines}x{g.columns} grid "
          f"in {runtime:.1f}s -> {out}")
    return 0


def _load_run(run_dir: Path):
    proj = Projection.load(run_dir / PROJECTION_FILE)
    dmatrix = load_dissimilarity(run_dir / MATRIX_FILE)
    labels_path = run_dir / LABELS_FILE
    labels = None
    if labels_path.exists():
        labels = np.asarray(json.loads(labels_path.read_text()), dtype=np.int64)
    return proj, dmatrix, labels


def cmd_cluster(args) -> int:
    run_dir = Path(args.run_dir)
    proj, dmatrix, labels = _load_run(run_dir)
    graph = delaunay_torus(proj, dmatrix)
    geodesic = geodesic_distances(graph)
    result = hierarchical_cluster(geodesic, args.k, args.mode)
    heights = u_heights(graph)
    topo = render_heightmap(proj, heights)
    result.outliers = detect_volcanoes(topo, result.labels)
    doc = result.to_json_dict()
    doc["tendency_gap"] = (
        tendency_gap(result.dendrogram) if proj.n > 10 else None
    )
    if labels is not None:
        accuracy = best_permutation_accuracy(result.labels, labels)
        doc["accuracy_vs_labels"] = accuracy
        doc["f1_vs_labels"] = f1_score(result.labels, labels)
        print(f"accuracy vs stored labels: {accuracy:.4f}")
    out = Path(args.out) if args.out else run_dir / f"cluster_k{args.k}_{args.mode}.json"
    out.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    sizes = np.bincount(result.labels)[1:]
    print(f"clustered into k={args.k} ({args.mode}); sizes: {sizes.tolist()}; "
          f"outlier candidates: {len(result.outliers)} -> {out}")
    return 0


def cmd_map(args) -> int:
    run_dir = Path(args.run_dir)
    proj, dmatrix, _ = _load_run(run_dir)
    graph = delaunay_torus(proj, dmatrix)
    heights = u_heights(graph)
    topo = render_heightmap(proj, heights)
    out = Path(args.out) if args.out else run_dir
    out.mkdir(parents=True, exist_ok=True)
    topo.save_json(out / "topomap.json")
    topo.save_png(out / "topomap.png", scale=args.png_scale)
    print(f"wrote topomap.json and topomap.png to {out}")
    return 0


def cmd_bench(args) -> int:
    suite = BenchmarkSuite.from_json_file(args.suite)
    if args.trials is not None:
        suite.trials = args.trials
        suite.seeds = None
    def progress(doc):
        status = f"err={doc['error_rate']:.3f}" if "error_rate" in doc else "FAILED"
        print(f"  {doc['dataset']}/{doc['algorithm']} seed={doc['seed']} {status}")
    reports = run_benchmark(suite, args.out, progress=progress if args.verbose else None)
    ok = sum(1 for r in reports if "error" not in r)
    print(f"{ok}/{len(reports)} trials complete -> {args.out}/results.jsonl, summary.csv")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmmap",
        description="Swarm projection, topographic maps, and geodesic clustering",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic benchmark dataset")
    p.add_argument("name", choices=GENERATOR_NAMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=_positive_int, default=None,
                   help="override the default point count")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("project", help="project a dataset or matrix onto the grid")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--matrix", action="store_true",
                   help="input is a square dissimilarity CSV, not a dataset")
    p.add_argument("--alpha", type=_positive_int, default=4)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--out", required=True, help="output run directory")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("cluster", help="cluster a projected run directory")
    p.add_argument("run_dir")
    p.add_argument("-k", type=_positive_int, required=True)
    p.add_argument("--mode", choices=MODES, default="compact")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("map", help="render the topographic map of a run directory")
    p.add_argument("run_dir")
    p.add_argument("--out", default=None)
    p.add_argument("--png-scale", type=_positive_int, default=6)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--trials", type=_positive_int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the local HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("SWARMMAP_PORT", "8040")))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SwarmMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
