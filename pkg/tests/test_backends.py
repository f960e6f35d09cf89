import os
import subprocess
import sys

import numpy as np
import pytest

from oracles import random_connected
from sepool._core import BACKENDS, DEFAULT_BACKEND, get_backend
from sepool.build import build_coding_tree
from sepool.graph import Graph, random_graph

compiled = pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")


def _raw(backend, g, k):
    a = g.adjacency()
    return get_backend(backend).greedy_hierarchy(
        g.node_count, a.indptr, a.indices, a.data, g.degree, g.total_volume, k, True)


def _graphs():
    rng = np.random.default_rng(2024)
    for i in range(60):
        n = int(rng.integers(2, 120))
        kind = i % 3
        if kind == 0:
            yield random_graph(n, float(rng.uniform(0.02, 0.3)), seed=i)
        elif kind == 1:
            yield random_graph(n, float(rng.uniform(0.02, 0.3)), seed=i, weights="uniform")
        else:
            yield random_connected(n, rng, weighted=bool(i % 2))
    yield Graph.from_edges(10, [(0, 1), (2, 3), (4, 5), (5, 6)])


@compiled
@pytest.mark.parametrize("k", [2, 3, 5])
def test_identical_results(k):
    for g in _graphs():
        if g.edge_count == 0:
            continue
        py = _raw("python", g, k)
        cc = _raw("compiled", g, k)
        assert list(py[0]) == list(cc[0])
        assert list(py[1]) == list(cc[1]) and list(py[2]) == list(cc[2])
        assert [tuple(m) for m in py[3]] == [tuple(m) for m in cc[3]]
        assert [tuple(r) for r in py[4]] == [tuple(r) for r in cc[4]]


@compiled
def test_identical_tree_json():
    g = random_graph(2000, 0.004, seed=5, weights="uniform")
    assert (build_coding_tree(g, 4, backend="python").to_json()
            == build_coding_tree(g, 4, backend="compiled").to_json())


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_backend("fortran")


def test_default_is_available():
    assert DEFAULT_BACKEND in BACKENDS


def test_env_forces_pure_python():
    env = dict(os.environ, SEP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from sepool._core import DEFAULT_BACKEND; print(DEFAULT_BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_falls_back_without_extension():
    code = ("import sys; sys.modules['sepool._core._greedy'] = None\n"
            "from sepool._core import BACKENDS, DEFAULT_BACKEND\n"
            "from sepool import Graph, build_coding_tree\n"
            "t = build_coding_tree(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), 2)\n"
            "print(DEFAULT_BACKEND, sorted(BACKENDS), t.height)")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "['python']", "2"]
