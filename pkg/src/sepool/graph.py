"""Undirected weighted graphs, edge-list ingestion and synthetic generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from os import PathLike

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, GraphFormatError

__all__ = [
    "Graph",
    "GraphFormatError",
    "load_edge_list",
    "write_edge_list",
    "load_features",
    "write_features",
    "make_ring",
    "make_grid",
    "random_graph",
    "is_connected",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with nonnegative edge weights.

    Edges are stored once each with ``src < dst``, sorted lexicographically.
    Self-loops and zero-weight edges are dropped, parallel edges are summed.
    Build instances with :meth:`from_edges`; the constructor trusts its input.
    """

    node_count: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    degree: np.ndarray
    total_volume: float
    labels: np.ndarray | None = None
    _csr: sp.csr_matrix = field(repr=False, default=None)

    @classmethod
    def from_edges(cls, node_count, edges, labels=None) -> "Graph":
        """``edges`` is an iterable of ``(u, v)`` or ``(u, v, w)``."""
        rows = [tuple(e) for e in edges]
        if rows:
            arr = np.array([(r[0], r[1], r[2] if len(r) > 2 else 1.0) for r in rows], dtype=float)
            u = arr[:, 0].astype(np.int64)
            v = arr[:, 1].astype(np.int64)
            w = arr[:, 2]
        else:
            u = v = np.zeros(0, dtype=np.int64)
            w = np.zeros(0)
        return cls.from_arrays(node_count, u, v, w, labels=labels)

    @classmethod
    def from_arrays(cls, node_count, u, v, w=None, labels=None) -> "Graph":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.ones(len(u)) if w is None else np.asarray(w, dtype=float)
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= node_count):
            raise ValueError("edge endpoint outside [0, node_count)")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise DomainError("edge weights must be finite and nonnegative")
        keep = (u != v) & (w > 0)
        lo = np.minimum(u, v)[keep]
        hi = np.maximum(u, v)[keep]
        # canonical (lo, hi) order, parallel edges summed
        coo = sp.coo_matrix((w[keep], (lo, hi)), shape=(node_count, node_count))
        coo.sum_duplicates()
        order = np.lexsort((coo.col, coo.row))
        src = coo.row[order].astype(np.int64)
        dst = coo.col[order].astype(np.int64)
        wt = coo.data[order].astype(float)
        degree = np.bincount(src, weights=wt, minlength=node_count) + np.bincount(
            dst, weights=wt, minlength=node_count
        )
        total = math.fsum(degree)
        for arr in (src, dst, wt, degree):
            arr.setflags(write=False)
        return cls(int(node_count), src, dst, wt, degree, total, labels)

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def isolated(self) -> np.ndarray:
        """Ids of degree-zero nodes."""
        return np.flatnonzero(self.degree == 0)

    def edges(self):
        for a, b, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield a, b, w

    def weight_between(self, a: int, b: int) -> float:
        return float(self.adjacency()[a, b])

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric CSR adjacency with sorted column indices."""
        if self._csr is None:
            n = self.node_count
            a = sp.coo_matrix(
                (np.concatenate([self.weight, self.weight]),
                 (np.concatenate([self.src, self.dst]), np.concatenate([self.dst, self.src]))),
                shape=(n, n),
            ).tocsr()
            a.sort_indices()
            object.__setattr__(self, "_csr", a)
        return self._csr

    def neighbors(self, v: int):
        a = self.adjacency()
        lo, hi = a.indptr[v], a.indptr[v + 1]
        return zip(a.indices[lo:hi].tolist(), a.data[lo:hi].tolist())

    def permute(self, perm) -> "Graph":
        """Relabel node ``i`` as ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph.from_arrays(self.node_count, perm[self.src], perm[self.dst], self.weight)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    def __hash__(self):
        return hash((self.node_count, self.src.tobytes(), self.dst.tobytes(), self.weight.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.node_count}, m={self.edge_count}, total_volume={self.total_volume})"


def load_edge_list(path: str | PathLike, weighted: bool = True, compact: bool = False) -> Graph:
    """Read a whitespace-separated ``u v [w]`` file.

    Lines starting with ``#`` and blank lines are skipped, except that a
    ``# nodes N`` comment sets a floor on the node count. A third column is
    read as the weight when ``weighted`` is true and ignored otherwise; missing
    weights default to 1.0. With ``compact`` the distinct ids are remapped to
    ``0..n-1`` in ascending order and the original ids kept in ``labels``.
    """
    us, vs, ws = [], [], []
    declared = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if text.startswith("#"):
                head = text[1:].split()
                if len(head) == 2 and head[0] == "nodes" and head[1].isdigit():
                    declared = int(head[1])
                continue
            if not text:
                continue
            parts = text.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"{path}:{lineno}: expected 'u v [w]', got {text!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if weighted and len(parts) == 3 else 1.0
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: cannot parse {text!r}") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative node id")
            if w < 0 or not math.isfinite(w):
                raise DomainError(f"{path}:{lineno}: weight must be finite and nonnegative, got {w}")
            us.append(u)
            vs.append(v)
            ws.append(w)
    u = np.array(us, dtype=np.int64)
    v = np.array(vs, dtype=np.int64)
    if compact:
        labels, inv = np.unique(np.concatenate([u, v]), return_inverse=True)
        return Graph.from_arrays(len(labels), inv[: len(u)], inv[len(u):], ws, labels=labels)
    n = int(max(u.max(), v.max())) + 1 if len(u) else 0
    return Graph.from_arrays(max(n, declared), u, v, ws)


def write_edge_list(graph: Graph, path: str | PathLike) -> None:
    """Write ``u v w`` lines; weights use ``repr`` so re-reading is exact.

    A ``# nodes N`` header keeps trailing isolated nodes across a round trip.
    """
    with open(path, "w") as fh:
        fh.write(f"# nodes {graph.node_count}\n")
        for a, b, w in graph.edges():
            fh.write(f"{a} {b} {w!r}\n")


def load_features(path: str | PathLike) -> np.ndarray:
    """CSV with one row per node; a non-numeric first row is a header."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        return np.zeros((0, 0))
    try:
        [float(x) for x in lines[0].split(",")]
    except ValueError:
        lines = lines[1:]
    try:
        rows = [[float(x) for x in ln.split(",")] for ln in lines]
    except ValueError as exc:
        raise GraphFormatError(f"{path}: {exc}") from None
    if len({len(r) for r in rows}) > 1:
        raise GraphFormatError(f"{path}: ragged feature rows")
    return np.array(rows, dtype=float).reshape(len(rows), -1)


def write_features(features, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        for row in np.atleast_2d(np.asarray(features, dtype=float)):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def make_ring(n: int) -> tuple[Graph, np.ndarray]:
    """Cycle ``C_n`` with nodes placed on the unit circle."""
    if n < 3:
        raise DomainError(f"ring needs n >= 3, got {n}")
    i = np.arange(n)
    g = Graph.from_arrays(n, i, (i + 1) % n)
    theta = 2 * np.pi * i / n
    return g, np.column_stack([np.cos(theta), np.sin(theta)])


def make_grid(width: int, height: int) -> tuple[Graph, np.ndarray]:
    """4-neighbour lattice; node ``row * width + col`` sits at ``(col, row)``."""
    if width < 2 or height < 2:
        raise DomainError(f"grid needs width, height >= 2, got {width}x{height}")
    ids = np.arange(width * height).reshape(height, width)
    u = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel()])
    v = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel()])
    g = Graph.from_arrays(width * height, u, v)
    rows, cols = np.divmod(np.arange(width * height), width)
    return g, np.column_stack([cols, rows]).astype(float)


def random_graph(n: int, p: float, seed: int = 0, weights: str | None = None) -> Graph:
    """Erdos-Renyi ``G(n, p)``.

    The edge count is drawn from ``Binomial(n(n-1)/2, p)`` and that many
    distinct pairs are sampled uniformly, which is distributionally identical
    to independent coin flips but linear in the number of edges.
    ``weights="uniform"`` draws i.i.d. weights from U(0.5, 1.5).
    """
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    if n < 0:
        raise DomainError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    pairs = n * (n - 1) // 2
    m = int(rng.binomial(pairs, p)) if pairs else 0
    idx = np.sort(rng.choice(pairs, size=m, replace=False)) if m else np.zeros(0, dtype=np.int64)
    # row i of the strict upper triangle starts at offset i*n - i*(i+1)/2
    rows = np.arange(max(n - 1, 0))
    starts = rows * n - rows * (rows + 1) // 2
    u = np.searchsorted(starts, idx, side="right") - 1
    v = idx - starts[u] + u + 1
    w = rng.uniform(0.5, 1.5, size=m) if weights == "uniform" else None
    return Graph.from_arrays(n, u, v, w)


def is_connected(graph: Graph) -> bool:
    if graph.node_count == 0:
        return True
    ncomp, _ = connected_components(graph.adjacency(), directed=False)
    return ncomp == 1
