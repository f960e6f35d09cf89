"""Fixed-height coding trees by structural entropy minimization, and the
hierarchical pooling algebra built on them."""

from .build import BuildTrace, build_coding_tree, fill_cross_layer, star_tree
from .entropy import EntropyReport, degree_entropy, delta_merge, delta_remove, structural_entropy
from .errors import DomainError, GraphFormatError, ShapeError, TreeStructureError
from .graph import (Graph, load_edge_list, load_features, make_grid, make_ring, random_graph,
                    write_edge_list, write_features)
from .oracle import brute_force_optimal
from .pooling import (ClusterAssignment, PoolingLevel, assignments_from_tree, pool,
                      reconstruct_metric, unpool)
from .tree import CodingTree, fill, merge, remove

__version__ = "0.1.0"
