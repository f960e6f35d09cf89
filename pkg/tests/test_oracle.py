import math

import numpy as np
import pytest

from oracles import naive_entropy
from sepool.build import build_coding_tree
from sepool.entropy import structural_entropy
from sepool.errors import DomainError
from sepool.graph import Graph, random_graph
from sepool.oracle import brute_force_optimal
from sepool.tree import leaf_depths


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def two_level_optimum(graph):
    """Minimum over every partition of V, each block one root child."""
    n = graph.node_count
    best = math.inf
    for part in set_partitions(list(range(n))):
        parent = [-1] * n + [-1]
        for block in part:
            parent.append(n)
            for x in block:
                parent[x] = len(parent) - 1
        best = min(best, naive_entropy(graph, parent))
    return best


def test_k2_star(k2):
    tree, h = brute_force_optimal(k2, 1)
    assert h == 1.0 and tree.height == 1


def test_k4_pinned(k4):
    # value recorded from the first oracle run
    _, h = brute_force_optimal(k4, 2)
    assert h == 1.6666666666666665


def test_p4_gap_pinned(p4):
    _, h = brute_force_optimal(p4, 2)
    assert h == 1.2516291673878228
    greedy = structural_entropy(p4, build_coding_tree(p4, 2)).total
    assert greedy - h == 0.0


def test_k1_is_star_entropy(c6):
    _, h = brute_force_optimal(c6, 1)
    assert h == pytest.approx(math.log2(6), abs=1e-12)


def test_matches_partition_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        g = random_graph(n, 0.6, seed=int(rng.integers(1 << 30)), weights="uniform")
        if g.edge_count == 0:
            continue
        _, h = brute_force_optimal(g, 2)
        assert h == pytest.approx(two_level_optimum(g), abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_tree_is_consistent(k):
    g = random_graph(7, 0.5, seed=k, weights="uniform")
    tree, h = brute_force_optimal(g, k)
    assert tree.height == k
    assert set(leaf_depths(tree).tolist()) == {k}
    assert h == pytest.approx(naive_entropy(g, tree.parent), abs=1e-12)


def test_deeper_never_worse():
    for seed in range(10):
        g = random_graph(7, 0.5, seed=seed)
        if g.edge_count == 0:
            continue
        hs = [brute_force_optimal(g, k)[1] for k in (1, 2, 3)]
        assert hs[0] >= hs[1] - 1e-12 >= hs[2] - 2e-12


def test_bounds_greedy():
    for seed in range(20):
        g = random_graph(8, 0.4, seed=seed, weights="uniform")
        if g.edge_count == 0:
            continue
        for k in (2, 3):
            _, opt = brute_force_optimal(g, k)
            greedy = structural_entropy(g, build_coding_tree(g, k)).total
            assert greedy >= opt - 1e-9


def test_refuses_large_graphs():
    with pytest.raises(DomainError, match="8"):
        brute_force_optimal(Graph.from_edges(9, [(0, 1)]), 2)


@pytest.mark.parametrize("k", [0, 4])
def test_refuses_height(k2, k):
    with pytest.raises(DomainError):
        brute_force_optimal(k2, k)


def test_refuses_edgeless():
    with pytest.raises(DomainError):
        brute_force_optimal(Graph.from_edges(3, []), 2)
