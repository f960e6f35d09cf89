"""Writers for assignment matrices and pooled levels."""

from __future__ import annotations

import json
from os import PathLike
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .graph import write_features
from .pooling import ClusterAssignment, PoolingLevel

__all__ = ["write_assignments", "write_level", "assignments_to_dict"]

FORMATS = ("json", "csv", "mm")


def assignments_to_dict(assignments) -> dict:
    return {
        "levels": [
            {"level": s.level, "clusters": s.shape[0], "nodes": s.shape[1],
             "labels": s.labels.tolist()}
            for s in assignments
        ]
    }


def write_assignments(assignments: list[ClusterAssignment], stem: str | PathLike,
                      fmt: str = "json") -> list[Path]:
    """Write ``S_1..S_k`` next to ``stem`` and return the paths written.

    json: ``<stem>.json`` with the cluster label of every column per level.
    csv:  ``<stem>.csv`` with ``level,cluster,node`` triples.
    mm:   one Matrix Market file ``<stem>.S<i>.mtx`` per level.
    """
    stem = Path(stem)
    if fmt == "json":
        path = stem.with_name(stem.name + ".json")
        path.write_text(json.dumps(assignments_to_dict(assignments), sort_keys=True) + "\n")
        return [path]
    if fmt == "csv":
        path = stem.with_name(stem.name + ".csv")
        with open(path, "w") as fh:
            fh.write("level,cluster,node\n")
            for s in assignments:
                for node, cluster in enumerate(s.labels.tolist()):
                    fh.write(f"{s.level},{cluster},{node}\n")
        return [path]
    if fmt == "mm":
        paths = []
        for s in assignments:
            path = stem.with_name(f"{stem.name}.S{s.level}.mtx")
            m = sp.coo_matrix(s.matrix.astype(np.int64))
            scipy.io.mmwrite(path, m, field="integer", symmetry="general")
            paths.append(path)
        return paths
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def write_level(level: PoolingLevel, stem: str | PathLike) -> list[Path]:
    """Pooled adjacency as ``<stem>.edges`` and features as ``<stem>.features.csv``.

    The edge list holds the upper triangle including the diagonal, so
    intra-cluster weight appears as ``u u w`` lines.
    """
    stem = Path(stem)
    edges = stem.with_name(stem.name + ".edges")
    a = sp.triu(level.adjacency).tocoo()
    order = np.lexsort((a.col, a.row))
    with open(edges, "w") as fh:
        fh.write(f"# nodes {level.size}\n")
        for i in order:
            fh.write(f"{int(a.row[i])} {int(a.col[i])} {float(a.data[i])!r}\n")
    paths = [edges]
    if level.features is not None:
        feats = stem.with_name(stem.name + ".features.csv")
        write_features(level.features, feats)
        paths.append(feats)
    return paths
