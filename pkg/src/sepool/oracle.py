"""Exact minimum-entropy coding trees for tiny graphs by exhaustive search."""

from __future__ import annotations

import math
from functools import lru_cache

from .build import fill_cross_layer
from .entropy import node_term, structural_entropy
from .errors import DomainError
from .graph import Graph
from .tree import CodingTree

MAX_NODES = 8


def brute_force_optimal(graph: Graph, k: int) -> tuple[CodingTree, float]:
    """Minimum structural entropy over all coding trees of height ``k``.

    Searches every nested set partition with at most ``k`` levels. Shallower
    hierarchies are included because padding a tree to height ``k`` with
    unary nodes leaves its entropy unchanged. The returned tree is padded so
    every leaf sits at depth ``k``.
    """
    n = graph.node_count
    if n > MAX_NODES:
        raise DomainError(f"brute force is limited to {MAX_NODES} nodes, got {n}")
    if k not in (1, 2, 3):
        raise DomainError(f"brute force supports k in {{1, 2, 3}}, got {k}")
    if graph.total_volume == 0:
        raise DomainError("structural entropy is undefined for an edgeless graph")

    deg = graph.degree.tolist()
    vol_g = graph.total_volume
    edges = list(graph.edges())
    full = (1 << n) - 1

    @lru_cache(maxsize=None)
    def vol(mask):
        return sum(deg[i] for i in range(n) if mask >> i & 1)

    @lru_cache(maxsize=None)
    def cut(mask):
        return sum(w for a, b, w in edges if (mask >> a & 1) != (mask >> b & 1))

    def term(block, parent):
        return node_term(cut(block), vol(block), vol(parent), vol_g)

    @lru_cache(maxsize=None)
    def below(mask, levels):
        """Best (entropy, blocks) for the subtree rooted at ``mask``."""
        if levels == 0:
            return (0.0, ()) if mask & (mask - 1) == 0 else (math.inf, ())
        return split(mask, mask, levels)

    @lru_cache(maxsize=None)
    def split(rest, owner, levels):
        """Best partition of ``rest`` into child blocks of ``owner``."""
        if rest == 0:
            return 0.0, ()
        low = rest & -rest
        others = rest ^ low
        best = (math.inf, ())
        sub = others
        while True:
            block = sub | low
            h_child, _ = below(block, levels - 1)
            if h_child < math.inf:
                h_rest, blocks = split(rest ^ block, owner, levels)
                h = term(block, owner) + h_child + h_rest
                if h < best[0] - 1e-15:
                    best = (h, (block,) + blocks)
            if sub == 0:
                break
            sub = (sub - 1) & others
        return best

    # materialize the optimum; the root takes id n, new nodes are appended
    parent = [-1] * (n + 1)

    def grow(mask, levels, node):
        for block in below(mask, levels)[1]:
            if block == mask:
                grow(block, levels - 1, node)  # unary level, collapsed
            elif block & (block - 1) == 0:
                parent[block.bit_length() - 1] = node
            else:
                parent.append(node)
                grow(block, levels - 1, len(parent) - 1)

    grow(full, k, n)
    tree = CodingTree.from_parents(graph, parent)
    while tree.height < k:
        tree.lift_root()
    fill_cross_layer(tree)
    tree = tree.compact()
    return tree, structural_entropy(graph, tree).total
