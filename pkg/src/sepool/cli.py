"""``sepool`` command line.

Data goes to files or stdout as JSON; diagnostics go to stderr. Every failure
exits nonzero with a message naming the stage that failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bench
from ._core import BACKENDS
from .build import build_coding_tree, star_tree
from .entropy import structural_entropy
from .errors import DomainError, GraphFormatError, ShapeError, TreeStructureError
from .export import FORMATS, write_assignments, write_level
from .graph import load_edge_list, load_features, make_grid, make_ring, random_graph, write_edge_list, write_features
from .oracle import MAX_NODES, brute_force_optimal
from .pooling import (assignments_from_tree, level_from_graph, mse, pool, round_trip,
                      shuffled_assignments)
from .tree import CodingTree

EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_DOMAIN = 4
EXIT_OUTPUT = 5


class StageError(Exception):
    def __init__(self, stage: str, message: str, code: int):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.code = code


def _stage(name, fn, *args, **kw):
    """Run ``fn`` and tag any library error with the stage it came from."""
    try:
        return fn(*args, **kw)
    except (GraphFormatError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        raise StageError(name, str(exc), EXIT_INPUT) from None
    except (DomainError, TreeStructureError, ShapeError, ValueError) as exc:
        raise StageError(name, str(exc), EXIT_DOMAIN) from None
    except OSError as exc:
        raise StageError(name, str(exc), EXIT_OUTPUT) from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _load_graph(args, path):
    return _stage("load", load_edge_list, path, weighted=not args.unweighted)


def _load_features(args, graph, path):
    if path is None:
        return None
    x = _stage("load", load_features, path)
    if x.shape[0] != graph.node_count:
        raise StageError("load", f"{path}: {x.shape[0]} feature rows for {graph.node_count} nodes",
                         EXIT_INPUT)
    return x


def _features_for(args, graph, path):
    """Explicit ``--features`` file, else ``<input stem>.features.csv`` if present."""
    if args.features:
        return _load_features(args, graph, args.features)
    guess = Path(path).with_suffix(".features.csv")
    return _load_features(args, graph, guess) if guess.exists() else None


def _require_height(args, allow_one=False):
    k = args.height
    if k < 1 or (k == 1 and not allow_one):
        raise StageError("args", f"--height must be an integer k > 1 for {args.command} "
                         f"(coding trees are built with k > 1), got {k}", EXIT_USAGE)


def _out_stem(args, path, suffix=""):
    """Output stem for one input: ``--out`` itself, or a file under ``--out`` in batch mode."""
    if args.input_dir:
        return Path(args.out) / (Path(path).stem + suffix)
    out = Path(args.out)
    return out.with_suffix("") if out.suffix == ".json" else out


def _level_sizes(tree):
    depth = tree.depths()
    sizes = [0] * (tree.height + 1)
    for v in tree.nodes():
        sizes[depth[v]] += 1
    return sizes


# ---- commands; each handles one input and returns a JSON-able summary

def _tree(args, path):
    _require_height(args)
    g = _load_graph(args, path)
    tree = _stage("build", build_coding_tree, g, args.height, backend=args.backend)
    report = structural_entropy(g, tree)
    summary = {"input": str(path), "nodes": g.node_count, "edges": g.edge_count,
               "height": tree.height, "entropy": report.total, "level_sizes": _level_sizes(tree)}
    if args.out:
        stem = _out_stem(args, path)
        tree_path = Path(args.out) if not args.input_dir and Path(args.out).suffix == ".json" \
            else stem.with_name(stem.name + ".tree.json")
        _stage("write", _write_text, tree_path, _dump(tree.to_dict()))
        s = _stage("assign", assignments_from_tree, tree)
        paths = _stage("write", write_assignments, s, stem.with_name(stem.name + ".assign"), args.format)
        summary["tree"] = str(tree_path)
        summary["assignments"] = [str(p) for p in paths]
    return summary


def _entropy(args, path):
    _require_height(args, allow_one=True)
    g = _load_graph(args, path)
    if args.tree:
        data = _stage("load", _read_json, args.tree)
        tree = _stage("load", CodingTree.from_dict, g, data)
    elif args.height == 1:
        tree = star_tree(g)
    else:
        tree = _stage("build", build_coding_tree, g, args.height, backend=args.backend)
    report = _stage("entropy", structural_entropy, g, tree)
    out = {"input": str(path), "height": tree.height, **report.to_dict()}
    if not args.terms:
        out.pop("terms")
    return out


def _pool(args, path):
    _require_height(args)
    g = _load_graph(args, path)
    x = _features_for(args, g, path)
    tree = _stage("build", build_coding_tree, g, args.height, backend=args.backend)
    s = _stage("assign", assignments_from_tree, tree)
    level = _stage("pool", level_from_graph, g, x)
    levels = []
    stem = _out_stem(args, path) if args.out else None
    if stem is not None:
        _stage("write", stem.parent.mkdir, parents=True, exist_ok=True)
    for si in s:
        level = _stage("pool", pool, level, si, args.agg)
        info = {"level": si.level, "nodes": level.size,
                "total_weight": float(level.adjacency.sum())}
        if stem is not None:
            paths = _stage("write", write_level, level, stem.with_name(f"{stem.name}.level{si.level}"))
            info["files"] = [str(p) for p in paths]
        levels.append(info)
    out = {"input": str(path), "height": args.height, "aggregation": args.agg,
           "total_weight": float(g.adjacency().sum()), "levels": levels}
    if stem is not None:
        paths = _stage("write", write_assignments, s, stem.with_name(stem.name + ".assign"), args.format)
        out["assignments"] = [str(p) for p in paths]
    return out


def _reconstruct(args, path):
    _require_height(args)
    g = _load_graph(args, path)
    x = _features_for(args, g, path)
    if x is None:
        raise StageError("load", "reconstruct needs --features or a sibling .features.csv", EXIT_INPUT)
    tree = _stage("build", build_coding_tree, g, args.height, backend=args.backend)
    levels = args.height - 1 if args.levels is None else args.levels
    if not 0 <= levels <= args.height:
        raise StageError("args", f"--levels must lie in [0, {args.height}], got {levels}", EXIT_USAGE)
    s = _stage("assign", assignments_from_tree, tree)[:levels]
    xr = _stage("pool", round_trip, x, s, args.agg)
    out = {"input": str(path), "height": args.height, "levels": levels,
           "aggregation": args.agg, "mse": mse(x, xr)}
    if args.baseline:
        rng = np.random.default_rng(args.seed)
        base = np.array([mse(x, round_trip(x, shuffled_assignments(s, rng), args.agg))
                         for _ in range(args.baseline)])
        q1, med, q3 = np.percentile(base, [25, 50, 75])
        out["baseline"] = {"samples": args.baseline, "seed": args.seed, "median": float(med),
                           "iqr": float(q3 - q1), "min": float(base.min())}
    if args.out:
        stem = _out_stem(args, path)
        dest = stem.with_name(stem.name + ".reconstructed.csv")
        _stage("write", write_features, xr, dest)
        out["reconstructed"] = str(dest)
    return out


def _oracle(args, path):
    g = _load_graph(args, path)
    if g.node_count > MAX_NODES:
        raise StageError("oracle", f"{path}: {g.node_count} nodes; exhaustive search is limited "
                         f"to {MAX_NODES}", EXIT_DOMAIN)
    _, opt = _stage("oracle", brute_force_optimal, g, args.height)
    if args.height == 1:
        greedy = structural_entropy(g, star_tree(g)).total
    else:
        t = _stage("build", build_coding_tree, g, args.height, backend=args.backend)
        greedy = structural_entropy(g, t).total
    return {"input": str(path), "height": args.height, "optimal": opt,
            "greedy": greedy, "gap": greedy - opt}


def _write_text(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


PER_GRAPH = {"tree": _tree, "entropy": _entropy, "pool": _pool,
             "reconstruct": _reconstruct, "oracle": _oracle}


def _one(args, path):
    try:
        return PER_GRAPH[args.command](args, path), None
    except StageError as exc:
        return None, (str(exc), exc.code)


def _inputs(args):
    if args.input and args.input_dir:
        raise StageError("args", "give --input or --input-dir, not both", EXIT_USAGE)
    if args.input:
        return [args.input]
    if args.input_dir:
        d = Path(args.input_dir)
        if not d.is_dir():
            raise StageError("load", f"{d}: not a directory", EXIT_INPUT)
        files = sorted(str(p) for p in d.glob("*.edges"))
        if not files:
            raise StageError("load", f"{d}: no .edges files", EXIT_INPUT)
        return files
    raise StageError("args", "--input or --input-dir is required", EXIT_USAGE)


def _workers(jobs):
    try:
        cap = int(os.environ.get("SEP_THREADS", "0"))
    except ValueError:
        cap = 0
    cap = cap if cap > 0 else (os.cpu_count() or 1)
    return max(1, min(cap, jobs))


def _run_graphs(args):
    paths = _inputs(args)
    if args.input_dir and args.command not in ("entropy", "oracle") and not args.out:
        raise StageError("args", "--input-dir needs --out DIR for per-graph outputs", EXIT_USAGE)
    if not args.input_dir:
        return PER_GRAPH[args.command](args, paths[0])
    workers = _workers(len(paths))
    if workers == 1:
        results = [_one(args, p) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool_:
            results = list(pool_.map(_one, [args] * len(paths), paths))
    out, failed = [], 0
    for p, (res, err) in zip(paths, results):
        if err:
            failed += 1
            args._exit = args._exit or err[1]
            _log(args, f"sepool {args.command}: {err[0]}", force=True)
            out.append({"input": p, "error": err[0]})
        else:
            out.append(res)
    return {"results": out, "failed": failed}


def _synth(args):
    if args.kind == "ring":
        g, x = _stage("synth", make_ring, args.n)
    elif args.kind == "grid":
        g, x = _stage("synth", make_grid, args.width, args.rows)
    else:
        if args.n < 2:
            raise StageError("synth", f"gnp needs n >= 2, got {args.n}", EXIT_DOMAIN)
        p = min(1.0, args.degree / (args.n - 1))
        g = random_graph(args.n, p, seed=args.seed, weights="uniform" if args.weighted else None)
        x = None
    out = {"kind": args.kind, "nodes": g.node_count, "edges": g.edge_count}
    if args.out:
        stem = Path(args.out)
        stem = stem.with_suffix("") if stem.suffix == ".edges" else stem
        _stage("write", stem.parent.mkdir, parents=True, exist_ok=True)
        _stage("write", write_edge_list, g, stem.with_name(stem.name + ".edges"))
        out["edges_file"] = str(stem.with_name(stem.name + ".edges"))
        if x is not None:
            _stage("write", write_features, x, stem.with_name(stem.name + ".features.csv"))
            out["features_file"] = str(stem.with_name(stem.name + ".features.csv"))
    return out


def _bench(args):
    names = sorted(BACKENDS) if args.backend == "both" else [args.backend or None]
    names = [n or _default_backend() for n in names]
    for n in names:
        if n not in BACKENDS:
            raise StageError("bench", f"backend {n!r} is not available", EXIT_DOMAIN)
    res = bench.run(args.sizes, args.degree, args.height, args.seed, args.repeats, names)
    if args.human:
        _log(args, bench.format_table(res))
    if args.out:
        _stage("write", _write_text, args.out, _dump(res))
    return res


def _default_backend():
    from ._core import DEFAULT_BACKEND
    return DEFAULT_BACKEND


def _log(args, msg, force=False):
    if force or not args.quiet:
        print(msg, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sepool", description="Structural entropy coding trees and pooling.")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file or stem (a directory with --input-dir)")
    common.add_argument("--quiet", action="store_true", help="suppress stdout summary and notes")
    common.add_argument("--human", action="store_true", help="also print a readable summary to stderr")
    common.add_argument("--seed", type=int, default=0)

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--input", help="edge list file")
    graph.add_argument("--input-dir", help="directory of .edges files, processed in parallel")
    graph.add_argument("--height", type=int, default=2, help="tree height k (default 2)")
    graph.add_argument("--unweighted", action="store_true", help="ignore a third weight column")
    graph.add_argument("--backend", choices=sorted(BACKENDS), default=None)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=FORMATS, default="json", help="assignment matrix format")

    agg = argparse.ArgumentParser(add_help=False)
    agg.add_argument("--features", help="CSV features, one row per node")

    sub.add_parser("tree", parents=[common, graph, fmt],
                   help="build a coding tree; write tree JSON and assignments")
    p = sub.add_parser("entropy", parents=[common, graph], help="structural entropy of a tree")
    p.add_argument("--tree", help="evaluate this tree JSON instead of building one")
    p.add_argument("--terms", action="store_true", help="include per-node terms")
    p = sub.add_parser("pool", parents=[common, graph, fmt, agg], help="pool adjacency and features")
    p.add_argument("--agg", choices=("sum", "mean"), default="sum")
    p = sub.add_parser("reconstruct", parents=[common, graph, agg], help="pool/unpool round-trip MSE")
    p.add_argument("--agg", choices=("sum", "mean"), default="mean")
    p.add_argument("--levels", type=int, default=None, help="levels to pool through (default k-1)")
    p.add_argument("--baseline", type=int, default=0, metavar="N",
                   help="also score N random partitions with the same level sizes")
    sub.add_parser("oracle", parents=[common, graph], help="greedy vs exhaustive optimum (<= 8 nodes)")

    p = sub.add_parser("synth", parents=[common], help="write a synthetic graph")
    p.add_argument("kind", choices=("ring", "grid", "gnp"))
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--rows", type=int, default=8)
    p.add_argument("--degree", type=float, default=8.0)
    p.add_argument("--weighted", action="store_true", help="uniform random weights for gnp")

    p = sub.add_parser("bench", parents=[common], help="time builds on a G(n, p) ladder")
    p.add_argument("--sizes", type=int, nargs="+", default=list(bench.DEFAULT_SIZES))
    p.add_argument("--degree", type=float, default=8.0)
    p.add_argument("--height", type=int, default=3)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--backend", choices=sorted(BACKENDS) + ["both"], default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args._exit = 0
    try:
        if args.command == "synth":
            out = _synth(args)
        elif args.command == "bench":
            out = _bench(args)
        else:
            out = _run_graphs(args)
    except StageError as exc:
        print(f"sepool {args.command}: {exc}", file=sys.stderr)
        return exc.code
    if not args.quiet:
        sys.stdout.write(_dump(out))
    if args.human and args.command != "bench":
        _log(args, json.dumps(out, indent=2, sort_keys=True))
    return args._exit


if __name__ == "__main__":
    sys.exit(main())
