"""Cluster assignment matrices from coding trees and the pooling algebra.

Pooling maps a level with adjacency ``A`` and features ``H`` through a 0/1
assignment ``S`` (clusters x nodes) to ``S A S^T`` and ``S H``; unpooling
goes back with ``S^T A S`` and ``S^T H``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .build import build_coding_tree
from .errors import ShapeError, TreeStructureError
from .graph import Graph
from .tree import CodingTree

__all__ = [
    "ClusterAssignment",
    "PoolingLevel",
    "assignments_from_tree",
    "pool",
    "unpool",
    "round_trip",
    "mse",
    "reconstruct_metric",
    "shuffled_assignments",
    "level_from_graph",
]


@dataclass(frozen=True)
class ClusterAssignment:
    """Hard assignment of the ``cols`` nodes of one level to ``rows`` clusters."""

    level: int
    matrix: sp.csr_matrix

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def labels(self) -> np.ndarray:
        """Cluster index of every column."""
        coo = self.matrix.tocoo()
        out = np.empty(self.matrix.shape[1], dtype=np.int64)
        out[coo.col] = coo.row
        return out

    @classmethod
    def from_labels(cls, level: int, labels, clusters: int | None = None) -> "ClusterAssignment":
        labels = np.asarray(labels, dtype=np.int64)
        rows = int(labels.max()) + 1 if clusters is None else clusters
        m = sp.csr_matrix((np.ones(len(labels)), (labels, np.arange(len(labels)))),
                          shape=(rows, len(labels)))
        return cls(level, m)

    def sizes(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()


@dataclass(frozen=True)
class PoolingLevel:
    adjacency: sp.csr_matrix
    features: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]


def level_from_graph(graph: Graph, features=None) -> PoolingLevel:
    if features is not None:
        features = np.asarray(features, dtype=float)
        if features.ndim == 1:
            features = features[:, None]
        if features.shape[0] != graph.node_count:
            raise ShapeError(f"{features.shape[0]} feature rows for {graph.node_count} nodes")
    return PoolingLevel(graph.adjacency().astype(float), features)


def assignments_from_tree(tree: CodingTree) -> list[ClusterAssignment]:
    """``S_1 .. S_k`` for a tree whose leaves all sit at depth ``k``.

    ``S_i`` maps the nodes at depth ``k - i + 1`` to their parents at depth
    ``k - i``. Within a depth, nodes are ordered by their smallest leaf id,
    so the columns of ``S_1`` are the graph nodes in id order.
    """
    k = tree.height
    depth = tree.depths()
    if any(depth[v] != k for v in range(tree.leaf_count)):
        raise TreeStructureError("assignment matrices need every leaf at depth k")
    levels = [tree.level(d) for d in range(k + 1)]
    out = []
    for i in range(1, k + 1):
        fine, coarse = levels[k - i + 1], levels[k - i]
        row_of = {v: r for r, v in enumerate(coarse)}
        rows = [row_of[tree.parent[v]] for v in fine]
        m = sp.csr_matrix((np.ones(len(fine)), (rows, np.arange(len(fine)))),
                          shape=(len(coarse), len(fine)))
        out.append(ClusterAssignment(i, m))
    return out


def _weights(s: ClusterAssignment, aggregation: str) -> sp.csr_matrix:
    if aggregation == "sum":
        return s.matrix
    if aggregation == "mean":
        sizes = s.sizes()
        return sp.diags(1.0 / np.where(sizes > 0, sizes, 1.0)) @ s.matrix
    raise ValueError(f"aggregation must be 'sum' or 'mean', got {aggregation!r}")


def pool(level: PoolingLevel, s: ClusterAssignment, aggregation: str = "sum") -> PoolingLevel:
    """Coarsen ``level`` through ``s``.

    The adjacency always sums (``S A S^T``) so total weight is conserved and
    intra-cluster weight lands on the diagonal. Features sum by default; with
    ``aggregation="mean"`` each cluster receives the mean of its members.
    """
    S = s.matrix
    if S.shape[1] != level.adjacency.shape[0]:
        raise ShapeError(f"assignment has {S.shape[1]} columns, level has {level.size} nodes")
    adj = (S @ level.adjacency @ S.T).tocsr()
    feats = None
    if level.features is not None:
        if level.features.shape[0] != S.shape[1]:
            raise ShapeError("feature rows do not match assignment columns")
        feats = np.asarray(_weights(s, aggregation) @ level.features)
    return PoolingLevel(adj, feats)


def unpool(level: PoolingLevel, s: ClusterAssignment) -> PoolingLevel:
    """Broadcast a coarse level back to the fine nodes of ``s``."""
    S = s.matrix
    if S.shape[0] != level.adjacency.shape[0]:
        raise ShapeError(f"assignment has {S.shape[0]} rows, level has {level.size} nodes")
    adj = (S.T @ level.adjacency @ S).tocsr()
    feats = None
    if level.features is not None:
        if level.features.shape[0] != S.shape[0]:
            raise ShapeError("feature rows do not match assignment rows")
        feats = np.asarray(S.T @ level.features)
    return PoolingLevel(adj, feats)


def round_trip(features, assignments, aggregation: str = "mean") -> np.ndarray:
    """Pool features down through ``assignments`` then broadcast back up."""
    h = np.asarray(features, dtype=float)
    for s in assignments:
        h = np.asarray(_weights(s, aggregation) @ h)
    for s in reversed(assignments):
        h = np.asarray(s.matrix.T @ h)
    return h


def mse(a, b) -> float:
    return float(np.mean((np.asarray(a) - np.asarray(b)) ** 2))


def reconstruct_metric(graph: Graph, features, k: int, aggregation: str = "mean",
                       levels: int | None = None, tree: CodingTree | None = None) -> float:
    """Mean squared error of features after a pool/unpool round trip.

    The round trip uses the first ``levels`` assignments of the height-``k``
    tree, ``k - 1`` by default: the last assignment sends everything to the
    root and would reduce every node to the global mean.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != graph.node_count:
        raise ShapeError(f"{x.shape[0]} feature rows for {graph.node_count} nodes")
    if tree is None:
        tree = build_coding_tree(graph, k)
    levels = k - 1 if levels is None else levels
    s = assignments_from_tree(tree)[:levels]
    return mse(x, round_trip(x, s, aggregation))


def shuffled_assignments(assignments, rng) -> list[ClusterAssignment]:
    """Random hierarchy with the same cluster count and arity at every level.

    Each level's columns are permuted independently, which keeps the row sums
    (cluster sizes) and the one-hot columns.
    """
    out = []
    for s in assignments:
        perm = rng.permutation(s.matrix.shape[1])
        out.append(ClusterAssignment(s.level, s.matrix[:, perm].tocsr()))
    return out
