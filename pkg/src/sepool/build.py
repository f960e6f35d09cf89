"""Fixed-height coding trees by greedy structural entropy minimization."""

from __future__ import annotations

from dataclasses import dataclass, field

from ._core import get_backend
from .entropy import structural_entropy
from .errors import DomainError
from .graph import Graph
from .tree import CodingTree

__all__ = ["BuildTrace", "build_coding_tree", "star_tree", "fill_cross_layer"]


@dataclass
class BuildTrace:
    """Decisions taken during one build.

    ``merges`` holds ``(a, b, gain)`` and ``removals`` ``(v, cost)`` in kernel
    ids (leaves ``0..n-1``, merge nodes numbered from ``n`` in creation order).
    ``fills`` holds the entropy before and after each FILL.
    """

    merges: list = field(default_factory=list)
    removals: list = field(default_factory=list)
    fills: list = field(default_factory=list)
    lifts: int = 0
    stage2_tree: CodingTree | None = None


def star_tree(graph: Graph) -> CodingTree:
    return CodingTree.star(graph)


def fill_cross_layer(tree: CodingTree, on_fill=None) -> int:
    """FILL every link that skips a height level; return the number of fills."""
    count = 0
    stack = [tree.root]
    while stack:
        v = stack.pop()
        for c in list(tree.children[v]):
            cur = c
            while tree.node_height[v] - tree.node_height[cur] > 1:
                before = on_fill and structural_entropy(tree.graph, tree).total
                cur = tree.fill(cur)
                count += 1
                if on_fill:
                    on_fill(before, structural_entropy(tree.graph, tree).total)
            if not tree.is_leaf(c):
                stack.append(c)
    return count


def build_coding_tree(graph: Graph, k: int, trace: BuildTrace | None = None,
                      backend: str | None = None) -> CodingTree:
    """Greedy coding tree of height exactly ``k`` with every leaf at depth ``k``.

    1. Merge the pair of root children with the largest entropy reduction
       until the root has two children.
    2. While the tree is taller than ``k``, delete the internal node whose
       removal raises the entropy least.
    3. Pad short trees with unary nodes under the root, then FILL every
       cross-layer link. Neither step changes the entropy.

    Ties go to the lexicographically smallest pair of minimum leaf ids in
    step 1 and to the smallest (minimum leaf id, subtree size) in step 2.
    The result is renumbered canonically (see :meth:`CodingTree.compact`).
    """
    if k is None or int(k) != k or k <= 1:
        raise DomainError(f"coding tree height must be an integer k > 1, got {k}")
    if graph.edge_count == 0:
        raise DomainError("cannot build a coding tree for an edgeless graph")
    kernel = get_backend(backend)
    a = graph.adjacency()
    record = trace is not None
    parent, vol, cut, merges, removals = kernel.greedy_hierarchy(
        graph.node_count, a.indptr, a.indices, a.data, graph.degree,
        graph.total_volume, int(k), record,
    )
    tree = CodingTree.from_parents(graph, parent, vol, cut)
    if record:
        trace.merges = merges
        trace.removals = removals
        trace.stage2_tree = tree.copy()

    while tree.height < k:
        tree.lift_root()
        if record:
            trace.lifts += 1
    fill_cross_layer(tree, on_fill=(lambda b, a_: trace.fills.append((b, a_))) if record else None)
    return tree.compact()
