import json

import numpy as np
import pytest

from oracles import leaf_sets, naive_entropy, random_parents
from sepool.entropy import structural_entropy
from sepool.errors import TreeStructureError
from sepool.graph import Graph, random_graph
from sepool.tree import CodingTree, fill, leaf_depths, merge, remove


def _edge_cut(graph, members):
    return sum(w for a, b, w in graph.edges() if (a in members) != (b in members))


def test_star(c4):
    t = CodingTree.star(c4)
    assert t.root == 4 and t.height == 1
    assert t.children[4] == [0, 1, 2, 3]
    assert t.leaf_of == {i: i for i in range(4)}
    assert leaf_depths(t).tolist() == [1, 1, 1, 1]


def test_merge_k2(k2):
    t = CodingTree.star(k2)
    e = merge(t, 0, 1)
    assert t.children[t.root] == [e]
    assert t.vol[e] == 2.0 and t.cut[e] == 0.0
    assert t.height == 2


def test_merge_c4_stats(c4):
    t = CodingTree.star(c4)
    e = t.merge(0, 1)
    assert t.vol[e] == 4.0
    assert t.cut[e] == _edge_cut(c4, {0, 1}) == 2.0
    assert t.children[t.root] == [e, 2, 3]


def test_merge_matches_rebuild():
    rng = np.random.default_rng(1)
    g = random_graph(15, 0.3, seed=4, weights="uniform")
    t = CodingTree.star(g)
    while len(t.children[t.root]) > 2:
        kids = t.children[t.root]
        a, b = (kids[i] for i in rng.choice(len(kids), 2, replace=False))
        t.merge(a, b)
        t.validate()
        fresh = t.compact()
        rebuilt = CodingTree.from_parents(g, fresh.parent)
        assert np.allclose(fresh.vol, rebuilt.vol) and np.allclose(fresh.cut, rebuilt.cut)
        assert structural_entropy(g, t).total == pytest.approx(naive_entropy(g, fresh.parent), abs=1e-12)


def test_merge_preconditions(c4):
    t = CodingTree.star(c4)
    e = t.merge(0, 1)
    with pytest.raises(TreeStructureError):
        t.merge(0, 2)
    with pytest.raises(TreeStructureError):
        t.merge(e, e)


def test_remove_chain(k2):
    t = CodingTree.from_parents(k2, [2, 2, 3, -1])
    assert t.height == 2
    remove(t, 2)
    assert t.height == 1
    assert t.children[t.root] == [0, 1]
    t.validate()


def test_remove_keeps_leaves(c6):
    rng = np.random.default_rng(3)
    t = CodingTree.from_parents(c6, random_parents(6, rng, unary=0.0))
    for v in [v for v in t.internal_nodes() if v != t.root]:
        t.remove(v)
        t.validate()
        assert t.leaves(t.root) == list(range(6))
    assert t.height == 1


def test_remove_preconditions(c4):
    t = CodingTree.star(c4)
    with pytest.raises(TreeStructureError):
        t.remove(t.root)
    with pytest.raises(TreeStructureError):
        t.remove(0)


def test_fill_depth_and_terms():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    # root -> {x -> {0, 1}, 2}: leaf 2 sits at depth 1 in a height-2 tree
    t = CodingTree.from_parents(g, [3, 3, 4, 4, -1])
    before = structural_entropy(g, t)
    e = fill(t, 2)
    assert t.depth(2) == 2 and t.parent[2] == e
    after = structural_entropy(g, t)
    assert after.terms[e] == before.terms[2]
    assert after.terms[2] == 0.0
    assert abs(after.total - before.total) < 1e-12


def test_fill_needs_cross_layer(c4):
    t = CodingTree.star(c4)
    with pytest.raises(TreeStructureError):
        t.fill(0)
    with pytest.raises(TreeStructureError):
        t.fill(t.root)


def test_lift_root_keeps_entropy(c4):
    t = CodingTree.star(c4)
    before = structural_entropy(c4, t).total
    e = t.lift_root()
    assert t.height == 2 and t.children[t.root] == [e]
    assert t.cut[e] == 0.0 and t.vol[e] == c4.total_volume
    assert structural_entropy(c4, t).total == before


def test_from_parents_rejects_bad_arrays(c4):
    with pytest.raises(TreeStructureError):
        CodingTree.from_parents(c4, [4, 4, 4, 4, -1, -1])  # two roots
    with pytest.raises(TreeStructureError):
        CodingTree.from_parents(c4, [4, 4, 4, 5, -1, 4, 5])  # graph node 3 has a child
    with pytest.raises(TreeStructureError):
        CodingTree.from_parents(c4, [4, 4, 4, 4, -1, 4])  # internal node without children
    with pytest.raises(TreeStructureError):
        CodingTree.from_parents(c4, [5, 5, 5, 5, 5, 4, -1])  # cycle off the root


def test_compact_canonical_ids(c4):
    t = CodingTree.star(c4)
    b = t.merge(2, 3)
    a = t.merge(0, 1)
    assert a > b
    c = t.compact()
    assert c.root == 4
    assert c.children[4] == [5, 6]
    assert c.leaves(5) == [0, 1] and c.leaves(6) == [2, 3]


def test_partition_and_levels(c4):
    t = CodingTree.from_parents(c4, [5, 5, 6, 6, -1, 4, 4])
    assert t.level(1) == [5, 6]
    assert t.partition(1) == [frozenset({0, 1}), frozenset({2, 3})]
    assert t.partition(2) == [frozenset({i}) for i in range(4)]


def test_json_round_trip():
    rng = np.random.default_rng(8)
    g = random_graph(20, 0.3, seed=2, weights="uniform")
    t = CodingTree.from_parents(g, random_parents(20, rng)).compact()
    data = json.loads(t.to_json())
    assert data["height"] == t.height
    back = CodingTree.from_dict(g, data)
    assert back.parent == t.parent and back.vol == t.vol and back.cut == t.cut


def test_from_dict_rejects_gaps(c4):
    data = CodingTree.star(c4).to_dict()
    data["nodes"][0]["id"] = 9
    with pytest.raises(TreeStructureError):
        CodingTree.from_dict(c4, data)


def test_leaf_sets_agree_with_tree():
    rng = np.random.default_rng(4)
    g = random_graph(10, 0.5, seed=1)
    parent = random_parents(10, rng)
    t = CodingTree.from_parents(g, parent)
    sets = leaf_sets(parent, 10)
    for v in t.nodes():
        assert set(t.leaves(v)) == sets[v]
        assert t.size[v] == len(sets[v])
        assert t.min_leaf[v] == min(sets[v])
