"""Edge-list text format: a header line "n m", then m rows "i j" (0-based, i < j)."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def write_edges(path, g: Graph) -> None:
    e = g.edges()
    with open(path, "w") as fh:
        fh.write(f"{g.n} {len(e)}\n")
        for i, j in e:
            fh.write(f"{int(i)} {int(j)}\n")


def read_edges(path) -> Graph:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("edge list header must be 'n m'")
        n, m = int(header[0]), int(header[1])
        rows = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.zeros((0, 2), np.int64)
    if rows.shape != (m, 2):
        raise ValueError(f"expected {m} edge rows, found {rows.shape[0]}")
    if m and (rows.min() < 0 or rows.max() >= n or np.any(rows[:, 0] == rows[:, 1])):
        raise ValueError("edge endpoints must be distinct vertices in 0..n-1")
    return Graph.from_edges(n, rows)
