"""Build-time ladder on G(n, p) graphs and the log-log slope of time vs edges."""

from __future__ import annotations

import time

import numpy as np

from ._core import BACKENDS
from .build import build_coding_tree
from .graph import random_graph

DEFAULT_SIZES = (1000, 2000, 4000, 8000, 16000)


def ladder_graphs(sizes=DEFAULT_SIZES, degree: float = 8.0, seed: int = 0):
    """One G(n, degree/(n-1)) graph per size; the i-th uses seed ``seed + i``."""
    out = []
    for i, n in enumerate(sizes):
        p = min(1.0, degree / max(n - 1, 1))
        out.append(random_graph(int(n), p, seed=seed + i))
    return out


def time_build(graph, k: int, backend: str | None = None, repeats: int = 3) -> float:
    """Best wall time over ``repeats`` full builds."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        build_coding_tree(graph, k, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def run(sizes=DEFAULT_SIZES, degree: float = 8.0, k: int = 3, seed: int = 0,
        repeats: int = 3, backends=None) -> dict:
    """Time every backend on the same ladder; returns rows and per-backend slopes."""
    backends = list(backends or sorted(BACKENDS))
    graphs = ladder_graphs(sizes, degree, seed)
    rows = []
    for g in graphs:
        g.adjacency()  # build the CSR outside the timed region
        for b in backends:
            rows.append({"backend": b, "n": g.node_count, "m": g.edge_count,
                         "seconds": time_build(g, k, b, repeats)})
    slopes = {}
    for b in backends:
        mine = [r for r in rows if r["backend"] == b]
        if len(mine) >= 2:
            slopes[b] = loglog_slope([r["m"] for r in mine], [r["seconds"] for r in mine])
    return {"degree": degree, "height": k, "seed": seed, "repeats": repeats,
            "rows": rows, "slope": slopes}


def format_table(result: dict) -> str:
    lines = [f"{'backend':<10}{'n':>8}{'m':>10}{'seconds':>12}"]
    for r in result["rows"]:
        lines.append(f"{r['backend']:<10}{r['n']:>8}{r['m']:>10}{r['seconds']:>12.4f}")
    for b, s in result["slope"].items():
        lines.append(f"slope[{b}] = {s:.3f}")
    if {"compiled", "python"} <= set(result["slope"]):
        by = {(r["backend"], r["n"]): r["seconds"] for r in result["rows"]}
        for r in result["rows"]:
            if r["backend"] == "compiled":
                lines.append(f"speedup n={r['n']}: {by[('python', r['n'])] / r['seconds']:.1f}x")
    return "\n".join(lines)
