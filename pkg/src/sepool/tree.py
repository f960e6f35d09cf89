"""Coding trees over graph nodes and the MERGE / REMOVE / FILL edits."""

from __future__ import annotations

import bisect
import json
import math
from collections import deque

import numpy as np

from .errors import TreeStructureError
from .graph import Graph

__all__ = ["CodingTree", "merge", "remove", "fill"]


class CodingTree:
    """Rooted tree whose leaves are the nodes of ``graph``.

    Nodes live in flat per-node lists indexed by node id. Leaf ``i`` has id
    ``i`` so ``leaf_of`` is the identity. Each node carries the volume of its
    leaf set and its cut, the total weight of edges with exactly one endpoint
    inside the leaf set. Deleted nodes stay in the arena with ``alive`` false
    until :meth:`compact` renumbers the tree.

    Children are kept ordered by the smallest leaf id below them.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self.parent: list[int] = []
        self.children: list[list[int]] = []
        self.vol: list[float] = []
        self.cut: list[float] = []
        self.min_leaf: list[int] = []
        self.size: list[int] = []
        self.node_height: list[int] = []
        self.alive: list[bool] = []
        self.root = -1

    # construction -----------------------------------------------------------

    def _new_node(self, parent, children, vol, cut, min_leaf, size, height) -> int:
        self.parent.append(parent)
        self.children.append(children)
        self.vol.append(float(vol))
        self.cut.append(float(cut))
        self.min_leaf.append(min_leaf)
        self.size.append(size)
        self.node_height.append(height)
        self.alive.append(True)
        return len(self.parent) - 1

    @classmethod
    def star(cls, graph: Graph) -> "CodingTree":
        """Height-1 tree: every graph node hangs directly off the root."""
        t = cls(graph)
        n = graph.node_count
        for v in range(n):
            t._new_node(n, [], graph.degree[v], graph.degree[v], v, 1, 0)
        t.root = t._new_node(-1, list(range(n)), graph.total_volume, 0.0, 0, n, 1 if n else 0)
        return t

    @classmethod
    def from_parents(cls, graph: Graph, parent, vol=None, cut=None) -> "CodingTree":
        """Build from a parent array (``-1`` marks the root, ``-2`` a dead slot).

        Ids ``0..n-1`` must be the leaves. Without ``vol``/``cut`` the node
        statistics are computed from the graph: volumes by summing degrees up
        the tree and cuts by walking every edge up to the lowest common
        ancestor of its endpoints.
        """
        parent = [int(p) for p in parent]
        n = graph.node_count
        t = cls(graph)
        roots = [i for i, p in enumerate(parent) if p == -1]
        if len(roots) != 1:
            raise TreeStructureError(f"expected exactly one root, found {len(roots)}")
        t.root = roots[0]
        size = len(parent)
        t.parent = parent
        t.children = [[] for _ in range(size)]
        t.alive = [p != -2 for p in parent]
        for v, p in enumerate(parent):
            if p >= 0:
                if not t.alive[p]:
                    raise TreeStructureError(f"node {v} hangs off deleted node {p}")
                t.children[p].append(v)
        for v in range(n):
            if t.children[v] or not t.alive[v]:
                raise TreeStructureError(f"graph node {v} is not a leaf")
        for v in range(n, size):
            if t.alive[v] and not t.children[v]:
                raise TreeStructureError(f"tree node {v} is a leaf but not a graph node")

        order = t._postorder()
        if len(order) != sum(t.alive):
            raise TreeStructureError("tree is disconnected or cyclic")
        t.min_leaf = list(range(size))
        t.size = [1] * size
        t.node_height = [0] * size
        for v in order:
            ch = t.children[v]
            if ch:
                t.min_leaf[v] = min(t.min_leaf[c] for c in ch)
                t.size[v] = sum(t.size[c] for c in ch)
                t.node_height[v] = 1 + max(t.node_height[c] for c in ch)
        for ch in t.children:
            ch.sort(key=t.min_leaf.__getitem__)

        if vol is None:
            t.vol, t.cut = t._stats_from_graph(order)
        else:
            t.vol = [float(x) for x in vol]
            t.cut = [float(x) for x in cut]
        return t

    def _postorder(self) -> list[int]:
        out, stack = [], [(self.root, False)]
        seen = 0
        while stack:
            v, done = stack.pop()
            if done:
                out.append(v)
                continue
            seen += 1
            if seen > len(self.parent):
                raise TreeStructureError("cycle in parent array")
            stack.append((v, True))
            stack.extend((c, False) for c in self.children[v])
        return out

    def _stats_from_graph(self, order):
        g = self.graph
        size = len(self.parent)
        vol = [0.0] * size
        cut = [0.0] * size
        for v in range(g.node_count):
            vol[v] = float(g.degree[v])
        for v in order:
            for c in self.children[v]:
                vol[v] += vol[c]
        depth = self.depths()
        for a, b, w in g.edges():
            # every node strictly below the LCA on either path is cut by (a, b)
            while a != b:
                if depth[a] >= depth[b]:
                    cut[a] += w
                    a = self.parent[a]
                else:
                    cut[b] += w
                    b = self.parent[b]
        return vol, cut

    # queries ------------------------------------------------------------------

    @property
    def leaf_count(self) -> int:
        return self.graph.node_count

    @property
    def leaf_of(self) -> dict[int, int]:
        return {v: v for v in range(self.graph.node_count)}

    @property
    def height(self) -> int:
        return self.node_height[self.root]

    def nodes(self):
        """Alive node ids in ascending order."""
        return [v for v, a in enumerate(self.alive) if a]

    def is_leaf(self, v: int) -> bool:
        return v < self.graph.node_count

    def internal_nodes(self):
        """Alive nodes that are neither the root nor a leaf."""
        n = self.graph.node_count
        return [v for v in range(n, len(self.alive)) if self.alive[v] and v != self.root]

    def depths(self) -> list[int]:
        depth = [-1] * len(self.parent)
        depth[self.root] = 0
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for c in self.children[v]:
                depth[c] = depth[v] + 1
                queue.append(c)
        return depth

    def depth(self, v: int) -> int:
        d = 0
        while self.parent[v] >= 0:
            v = self.parent[v]
            d += 1
        return d

    def leaves(self, v: int) -> list[int]:
        """Sorted graph nodes below ``v``."""
        n = self.graph.node_count
        out, stack = [], [v]
        while stack:
            x = stack.pop()
            if x < n:
                out.append(x)
            else:
                stack.extend(self.children[x])
        return sorted(out)

    def level(self, depth: int) -> list[int]:
        """Nodes at ``depth`` ordered by smallest leaf id."""
        d = self.depths()
        return sorted((v for v in self.nodes() if d[v] == depth), key=self.min_leaf.__getitem__)

    def partition(self, depth: int) -> list[frozenset]:
        """Leaf sets of the nodes at ``depth``."""
        return [frozenset(self.leaves(v)) for v in self.level(depth)]

    def weight_between(self, a: int, b: int) -> float:
        """Total edge weight joining the leaf sets of ``a`` and ``b``."""
        la, lb = self.leaves(a), self.leaves(b)
        if len(la) > len(lb):
            la, lb = lb, la
        other = set(lb)
        # fsum is exactly rounded, so the result does not depend on argument order
        return math.fsum(w for x in la for y, w in self.graph.neighbors(x) if y in other)

    def copy(self) -> "CodingTree":
        t = CodingTree(self.graph)
        t.parent = list(self.parent)
        t.children = [list(c) for c in self.children]
        t.vol = list(self.vol)
        t.cut = list(self.cut)
        t.min_leaf = list(self.min_leaf)
        t.size = list(self.size)
        t.node_height = list(self.node_height)
        t.alive = list(self.alive)
        t.root = self.root
        return t

    def validate(self) -> None:
        """Raise :class:`TreeStructureError` unless parent/child links agree."""
        n = self.graph.node_count
        if self.parent[self.root] != -1:
            raise TreeStructureError("root has a parent")
        for v in self.nodes():
            for c in self.children[v]:
                if self.parent[c] != v or not self.alive[c]:
                    raise TreeStructureError(f"broken link {v} -> {c}")
            if v != self.root and not self.alive[self.parent[v]]:
                raise TreeStructureError(f"node {v} hangs off a deleted node")
            if v >= n and not self.children[v]:
                raise TreeStructureError(f"internal node {v} has no children")
        if len(self._postorder()) != len(self.nodes()):
            raise TreeStructureError("unreachable nodes")
        if sorted(self.leaves(self.root)) != list(range(n)):
            raise TreeStructureError("leaf set differs from graph nodes")

    # edits --------------------------------------------------------------------

    def _insert_child(self, p: int, c: int) -> None:
        ch = self.children[p]
        ch.insert(bisect.bisect(ch, self.min_leaf[c], key=self.min_leaf.__getitem__), c)
        self.parent[c] = p

    def _refresh_height(self, v: int) -> None:
        while v >= 0:
            h = 1 + max(self.node_height[c] for c in self.children[v])
            if h == self.node_height[v]:
                return
            self.node_height[v] = h
            v = self.parent[v]

    def merge(self, a: int, b: int) -> int:
        """Put root children ``a`` and ``b`` under a new root child; return its id."""
        r = self.root
        if a == b or self.parent[a] != r or self.parent[b] != r or not (self.alive[a] and self.alive[b]):
            raise TreeStructureError(f"merge needs two distinct root children, got {a}, {b}")
        w = self.weight_between(a, b)
        cut = max(self.cut[a] + self.cut[b] - 2.0 * w, 0.0)
        ch = sorted((a, b), key=self.min_leaf.__getitem__)
        e = self._new_node(
            r, ch, self.vol[a] + self.vol[b], cut,
            min(self.min_leaf[a], self.min_leaf[b]), self.size[a] + self.size[b],
            1 + max(self.node_height[a], self.node_height[b]),
        )
        self.children[r] = [x for x in self.children[r] if x not in (a, b)]
        self.parent[a] = self.parent[b] = e
        self._insert_child(r, e)
        self._refresh_height(r)
        return e

    def remove(self, v: int) -> None:
        """Delete internal node ``v``, lifting its children to its parent."""
        if v == self.root or self.is_leaf(v) or not self.alive[v]:
            raise TreeStructureError(f"remove needs an internal non-root node, got {v}")
        p = self.parent[v]
        self.children[p].remove(v)
        for c in self.children[v]:
            self._insert_child(p, c)
        self.children[v] = []
        self.alive[v] = False
        self.parent[v] = -2
        self.node_height[p] = 0
        self._refresh_height(p)

    def fill(self, v: int) -> int:
        """Splice a copy of ``v``'s statistics between ``v`` and its parent."""
        p = self.parent[v]
        if p < 0 or not self.alive[v] or self.node_height[p] - self.node_height[v] <= 1:
            raise TreeStructureError(f"fill needs a cross-layer link above node {v}")
        e = self._new_node(p, [v], self.vol[v], self.cut[v], self.min_leaf[v],
                           self.size[v], self.node_height[v] + 1)
        ch = self.children[p]
        # siblings are sorted by their distinct min leaves
        ch[bisect.bisect_left(ch, self.min_leaf[v], key=self.min_leaf.__getitem__)] = e
        self.parent[v] = e
        return e

    def lift_root(self) -> int:
        """Insert a unary node between the root and all of its children.

        The new node covers every leaf, so its cut is zero and no entropy
        term changes.
        """
        r = self.root
        e = self._new_node(r, self.children[r], self.vol[r], 0.0, self.min_leaf[r],
                           self.size[r], self.node_height[r])
        for c in self.children[e]:
            self.parent[c] = e
        self.children[r] = [e]
        self.node_height[r] += 1
        return e

    # canonical form and serialization ----------------------------------------

    def compact(self) -> "CodingTree":
        """Copy without dead slots; internal ids ordered by (depth, min leaf)."""
        n = self.graph.node_count
        depth = self.depths()
        internal = sorted((v for v in self.nodes() if v >= n),
                          key=lambda v: (depth[v], self.min_leaf[v]))
        new_id = {v: v for v in range(n)}
        for i, v in enumerate(internal):
            new_id[v] = n + i
        old = list(range(n)) + internal
        parent = [new_id[self.parent[v]] if self.parent[v] >= 0 else -1 for v in old]
        return CodingTree.from_parents(
            self.graph, parent, [self.vol[v] for v in old], [self.cut[v] for v in old]
        )

    def to_dict(self) -> dict:
        nodes = [
            {"id": v, "parent": self.parent[v] if self.parent[v] >= 0 else None,
             "children": list(self.children[v]), "vol": self.vol[v], "cut": self.cut[v]}
            for v in self.nodes()
        ]
        return {"height": self.height, "nodes": nodes,
                "leaf_of": {str(k): v for k, v in self.leaf_of.items()}}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, graph: Graph, data: dict) -> "CodingTree":
        """Inverse of :meth:`to_dict`; ids must already be compact."""
        nodes = sorted(data["nodes"], key=lambda d: d["id"])
        if [d["id"] for d in nodes] != list(range(len(nodes))):
            raise TreeStructureError("tree JSON ids are not 0..N-1")
        if any(int(k) != v for k, v in data.get("leaf_of", {}).items()):
            raise TreeStructureError("leaf_of must map graph node i to tree node i")
        parent = [-1 if d["parent"] is None else d["parent"] for d in nodes]
        return cls.from_parents(graph, parent, [d["vol"] for d in nodes], [d["cut"] for d in nodes])

    def __repr__(self):
        return f"CodingTree(leaves={self.leaf_count}, nodes={sum(self.alive)}, height={self.height})"


def merge(tree: CodingTree, a: int, b: int) -> int:
    return tree.merge(a, b)


def remove(tree: CodingTree, v: int) -> None:
    tree.remove(v)


def fill(tree: CodingTree, v: int) -> int:
    return tree.fill(v)


def leaf_depths(tree: CodingTree) -> np.ndarray:
    d = tree.depths()
    return np.array(d[: tree.leaf_count])
