"""Structural entropy of a graph under a coding tree, plus edit deltas.

Every non-root tree node ``v`` contributes

    -(cut(v) / vol(G)) * log(vol(v) / vol(parent(v)))

and the structural entropy is the sum of those terms. A node with zero cut
or zero volume contributes nothing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DomainError, TreeStructureError
from .graph import Graph
from .tree import CodingTree

__all__ = [
    "EntropyReport",
    "node_term",
    "structural_entropy",
    "delta_merge",
    "delta_remove",
    "degree_entropy",
]


@dataclass
class EntropyReport:
    total: float
    terms: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"total": self.total, "terms": {str(k): v for k, v in self.terms.items()}}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def node_term(cut: float, vol: float, parent_vol: float, total_volume: float,
              log=math.log2) -> float:
    if cut == 0 or vol == 0:
        return 0.0
    return -(cut / total_volume) * log(vol / parent_vol)


def _check(graph: Graph, tree: CodingTree) -> None:
    if tree.graph is not graph and tree.graph != graph:
        raise TreeStructureError("tree was built over a different graph")
    if graph.total_volume == 0:
        raise DomainError("structural entropy is undefined for an edgeless graph")


def structural_entropy(graph: Graph, tree: CodingTree, base: float = 2.0) -> EntropyReport:
    """Evaluate the entropy of ``graph`` under ``tree`` from the node statistics."""
    _check(graph, tree)
    log = math.log2 if base == 2.0 else (lambda x: math.log(x, base))
    vol_g = graph.total_volume
    terms = {}
    for v in tree.nodes():
        p = tree.parent[v]
        if p < 0:
            continue
        terms[v] = node_term(tree.cut[v], tree.vol[v], tree.vol[p], vol_g, log)
    return EntropyReport(math.fsum(terms.values()), terms)


def delta_merge(graph: Graph, tree: CodingTree, a: int, b: int) -> float:
    """Entropy reduction ``H(T) - H(T')`` from merging root children ``a`` and ``b``.

    Only the terms of ``a``, ``b`` and the new node change, which collapses to
    ``2 w(a, b) / vol(G) * log(vol(G) / (vol(a) + vol(b)))``.
    """
    _check(graph, tree)
    r = tree.root
    if a == b or tree.parent[a] != r or tree.parent[b] != r:
        raise TreeStructureError(f"delta_merge needs two distinct root children, got {a}, {b}")
    w = tree.weight_between(a, b)
    joint = tree.vol[a] + tree.vol[b]
    if w == 0 or joint == 0:
        return 0.0
    vol_g = graph.total_volume
    return (2.0 * w / vol_g) * math.log2(vol_g / joint)


def delta_remove(graph: Graph, tree: CodingTree, v: int) -> float:
    """Entropy increase ``H(T') - H(T)`` from deleting internal node ``v``.

    The children of ``v`` re-attach to its parent ``p``; the result is
    ``(sum(cut(c)) - cut(v)) / vol(G) * log(vol(p) / vol(v))``.
    """
    _check(graph, tree)
    if v == tree.root or tree.is_leaf(v) or not tree.alive[v]:
        raise TreeStructureError(f"delta_remove needs an internal non-root node, got {v}")
    vol_v = tree.vol[v]
    if vol_v == 0:
        return 0.0
    inner = sum(tree.cut[c] for c in tree.children[v]) - tree.cut[v]
    return (inner / graph.total_volume) * math.log2(tree.vol[tree.parent[v]] / vol_v)


def degree_entropy(graph: Graph) -> float:
    """Shannon entropy (bits) of the normalized degree distribution."""
    vol_g = graph.total_volume
    return -math.fsum((d / vol_g) * math.log2(d / vol_g) for d in graph.degree.tolist() if d > 0)
