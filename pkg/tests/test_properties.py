import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_entropy
from sepool.build import BuildTrace, build_coding_tree
from sepool.entropy import degree_entropy, delta_remove, structural_entropy
from sepool.graph import Graph
from sepool.pooling import assignments_from_tree, level_from_graph, pool
from sepool.tree import leaf_depths


@st.composite
def graphs(draw, max_nodes=25, integer=False):
    n = draw(st.integers(2, max_nodes))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    weight = st.integers(1, 5) if integer else st.floats(0.01, 10.0)
    edges = draw(st.lists(st.tuples(pairs, weight), min_size=1, max_size=3 * n))
    g = Graph.from_edges(n, [(a, b, float(w)) for (a, b), w in edges])
    if g.edge_count == 0:
        g = Graph.from_edges(n, [(0, 1)])
    return g


heights = st.integers(2, 6)


@settings(max_examples=150, deadline=None)
@given(graphs(), heights)
def test_build_shape_and_entropy(g, k):
    trace = BuildTrace()
    t = build_coding_tree(g, k, trace=trace)
    t.validate()
    assert t.height == k
    assert set(leaf_depths(t).tolist()) == {k}
    h = structural_entropy(g, t).total
    assert h == pytest.approx(naive_entropy(g, t.parent), abs=1e-9)
    # every removal costs >= 0, so the build never ends above the star tree
    assert h <= degree_entropy(g) + 1e-9
    assert all(abs(a - b) < 1e-12 for b, a in trace.fills)


@settings(max_examples=100, deadline=None)
@given(graphs(), heights)
def test_deterministic(g, k):
    assert build_coding_tree(g, k).to_json() == build_coding_tree(g, k).to_json()


@settings(max_examples=100, deadline=None)
@given(graphs(integer=True), heights)
def test_pooling_conserves_volume(g, k):
    level = level_from_graph(g)
    total = level.adjacency.sum()
    for s in assignments_from_tree(build_coding_tree(g, k)):
        level = pool(level, s)
        a = level.adjacency.toarray()
        assert a.sum() == total
        assert np.array_equal(a, a.T)


@settings(max_examples=80, deadline=None)
@given(graphs(max_nodes=15), st.integers(2, 4), st.data())
def test_remove_delta_matches_recompute(g, k, data):
    t = build_coding_tree(g, k)
    inner = [v for v in t.internal_nodes() if v != t.root]
    v = data.draw(st.sampled_from(inner))
    before = structural_entropy(g, t).total
    d = delta_remove(g, t, v)
    assert d >= 0.0
    t.remove(v)
    assert naive_entropy(g, t.compact().parent) - before == pytest.approx(d, abs=1e-9)
