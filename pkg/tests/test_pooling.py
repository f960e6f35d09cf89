import numpy as np
import pytest
import scipy.sparse as sp

from oracles import dense_pool
from sepool.build import build_coding_tree
from sepool.errors import ShapeError, TreeStructureError
from sepool.graph import make_ring, random_graph
from sepool.pooling import (ClusterAssignment, PoolingLevel, assignments_from_tree, level_from_graph,
                            mse, pool, reconstruct_metric, round_trip, shuffled_assignments, unpool)
from sepool.tree import CodingTree

C4_CLUSTERS = ClusterAssignment.from_labels(1, [0, 0, 1, 1])
FEATS = np.array([[1.0], [2.0], [3.0], [4.0]])


def test_star_assignment(c4):
    (s,) = assignments_from_tree(CodingTree.star(c4))
    assert s.shape == (1, 4)
    assert s.matrix.toarray().tolist() == [[1, 1, 1, 1]]


def test_k2_assignments(k2):
    s1, s2 = assignments_from_tree(build_coding_tree(k2, 2))
    assert s1.matrix.toarray().tolist() == [[1, 1]]
    assert s2.matrix.toarray().tolist() == [[1]]


def test_c4_assignment(c4):
    s1, s2 = assignments_from_tree(build_coding_tree(c4, 2))
    m = s1.matrix.toarray()
    assert m.sum(axis=0).tolist() == [1, 1, 1, 1]
    assert m.sum(axis=1).tolist() == [2, 2]
    assert s1.labels.tolist() == [0, 0, 1, 1]
    assert s2.shape == (1, 2)


def test_unequal_leaf_depths(c4):
    t = CodingTree.from_parents(c4, [5, 5, 4, 4, -1, 4])
    with pytest.raises(TreeStructureError):
        assignments_from_tree(t)


def test_identity_pool(c4):
    level = level_from_graph(c4, FEATS)
    s = ClusterAssignment(1, sp.identity(4, format="csr"))
    out = pool(level, s)
    assert np.array_equal(out.adjacency.toarray(), level.adjacency.toarray())
    assert np.array_equal(out.features, FEATS)
    back = unpool(out, s)
    assert np.array_equal(back.features, FEATS)


def test_c4_pool(c4):
    level = level_from_graph(c4, FEATS)
    out = pool(level, C4_CLUSTERS)
    expected = dense_pool(c4.adjacency().toarray(), C4_CLUSTERS.matrix.toarray())
    assert expected.tolist() == [[2, 2], [2, 2]]
    assert np.array_equal(out.adjacency.toarray(), expected)
    assert out.features.tolist() == [[3], [7]]


def test_unpool_broadcasts(c4):
    out = unpool(pool(level_from_graph(c4, FEATS), C4_CLUSTERS), C4_CLUSTERS)
    assert out.features.tolist() == [[3], [3], [7], [7]]
    s = C4_CLUSTERS.matrix
    assert (s.T @ s).toarray().tolist() == [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]
    assert (s @ s.T).toarray().tolist() == [[2, 0], [0, 2]]


def test_mean_aggregation(c4):
    out = pool(level_from_graph(c4, FEATS), C4_CLUSTERS, aggregation="mean")
    assert out.features.tolist() == [[1.5], [3.5]]
    with pytest.raises(ValueError):
        pool(level_from_graph(c4, FEATS), C4_CLUSTERS, aggregation="max")


def test_shape_errors(c4):
    level = level_from_graph(c4, FEATS)
    bad = ClusterAssignment.from_labels(1, [0, 1, 1])
    with pytest.raises(ShapeError):
        pool(level, bad)
    with pytest.raises(ShapeError):
        unpool(level, C4_CLUSTERS)
    with pytest.raises(ShapeError):
        pool(PoolingLevel(level.adjacency, FEATS[:3]), C4_CLUSTERS)
    with pytest.raises(ShapeError):
        level_from_graph(c4, FEATS[:2])
    with pytest.raises(ShapeError):
        reconstruct_metric(c4, FEATS[:3], 2)


def test_hierarchy_invariants():
    rng = np.random.default_rng(0)
    for seed in range(15):
        g = random_graph(60, 0.08, seed=seed)
        if g.edge_count == 0:
            continue
        k = int(rng.integers(2, 5))
        s = assignments_from_tree(build_coding_tree(g, k))
        assert len(s) == k
        comp = sp.identity(g.node_count, format="csr")
        level = level_from_graph(g, rng.normal(size=(g.node_count, 3)))
        total = level.adjacency.sum()
        for si in s:
            m = si.matrix
            assert np.all(np.asarray(m.sum(axis=0)).ravel() == 1)
            gram = (m @ m.T).toarray()
            assert np.array_equal(gram, np.diag(si.sizes()))
            comp = m @ comp
            level = pool(level, si)
            a = level.adjacency.toarray()
            assert a.sum() == total
            assert np.abs(a - a.T).max() <= 1e-12
        assert comp.toarray().tolist() == [[1.0] * g.node_count]


def test_permutation_equivariance():
    rng = np.random.default_rng(3)
    g = random_graph(30, 0.2, seed=1, weights="uniform")
    x = rng.normal(size=(30, 2))
    s = assignments_from_tree(build_coding_tree(g, 2))[0]
    perm = rng.permutation(30)
    p = sp.csr_matrix((np.ones(30), (perm, np.arange(30))), shape=(30, 30))  # node i -> perm[i]
    base = pool(level_from_graph(g, x), s)
    moved = PoolingLevel((p @ g.adjacency() @ p.T).tocsr(), p @ x)
    out = pool(moved, ClusterAssignment(1, (s.matrix @ p.T).tocsr()))
    assert np.allclose(out.adjacency.toarray(), base.adjacency.toarray(), atol=1e-12)
    assert np.allclose(out.features, base.features, atol=1e-12)


def test_mean_round_trip_is_projection():
    g, x = make_ring(32)
    s = assignments_from_tree(build_coding_tree(g, 3))[:2]
    once = round_trip(x, s, "mean")
    assert np.allclose(round_trip(once, s, "mean"), once, atol=1e-12)


def test_reconstruct_identity_is_exact(ring64):
    g, x = ring64
    assert reconstruct_metric(g, x, 2, levels=0) == 0.0
    eye = [ClusterAssignment(1, sp.identity(64, format="csr"))]
    assert mse(x, round_trip(x, eye, "mean")) == 0.0


def test_reconstruct_centroids(c4):
    # clusters {0,1} and {2,3}: every node is off its centroid by 0.5
    assert reconstruct_metric(c4, FEATS, 2) == 0.25


def test_shuffled_keeps_sizes():
    g, _ = make_ring(64)
    s = assignments_from_tree(build_coding_tree(g, 3))
    r = shuffled_assignments(s, np.random.default_rng(0))
    for a, b in zip(s, r):
        assert np.array_equal(a.sizes(), b.sizes())
        assert np.all(np.asarray(b.matrix.sum(axis=0)).ravel() == 1)
    assert not np.array_equal(s[0].labels, r[0].labels)
