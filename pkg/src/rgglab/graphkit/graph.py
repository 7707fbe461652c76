"""Compressed sparse adjacency for simple undirected graphs."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from numba import njit


class Graph:
    """Simple undirected graph stored as CSR arrays with sorted rows."""

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int32)
        if self.indptr.shape != (self.n + 1,):
            raise ValueError("indptr must have length n + 1")
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self._sets = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "Graph":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        both = np.concatenate([e, e[:, ::-1]])
        if both.size:
            both = np.unique(both, axis=0)
        counts = np.bincount(both[:, 0], minlength=n) if both.size else np.zeros(n, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, both[:, 1] if both.size else np.zeros(0, np.int32))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        k = np.searchsorted(row, v)
        return bool(k < row.size and row[k] == v)

    def adjacency_sets(self) -> list[set]:
        if self._sets is None:
            self._sets = [set(self.neighbors(v).tolist()) for v in range(self.n)]
        return self._sets

    def edges(self) -> np.ndarray:
        """Edges (i, j) with i < j, sorted lexicographically."""
        rows = np.repeat(np.arange(self.n), self.degrees())
        mask = rows < self.indices
        return np.stack([rows[mask], self.indices[mask]], axis=1).astype(np.int64)

    def subgraph(self, vertices) -> "Graph":
        """Induced subgraph; vertex k of the result is ``vertices[k]``."""
        vertices = np.asarray(vertices, dtype=np.int64)
        pos = -np.ones(self.n, dtype=np.int64)
        pos[vertices] = np.arange(vertices.size)
        starts, stops = self.indptr[vertices], self.indptr[vertices + 1]
        lengths = stops - starts
        rows = np.repeat(np.arange(vertices.size), lengths)
        flat = np.concatenate([self.indices[a:b] for a, b in zip(starts, stops)]) \
            if vertices.size else np.zeros(0, np.int64)
        cols = pos[flat]
        keep = cols >= 0
        rows, cols = rows[keep], cols[keep]
        order = np.lexsort((cols, rows))
        counts = np.bincount(rows, minlength=vertices.size)
        indptr = np.zeros(vertices.size + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return Graph(vertices.size, indptr, cols[order])

    def components(self) -> list[np.ndarray]:
        """Connected components as sorted vertex arrays, ordered by smallest vertex."""
        label = _component_labels(self.n, self.indptr, self.indices)
        order = np.argsort(label, kind="stable")
        bounds = np.searchsorted(label[order], np.arange(label.max() + 2 if self.n else 1))
        return [order[bounds[k]:bounds[k + 1]] for k in range(bounds.size - 1)]

    def is_proper_colouring(self, colours) -> bool:
        colours = np.asarray(colours)
        if colours.shape != (self.n,) or (self.n and colours.min() < 0):
            return False
        rows = np.repeat(np.arange(self.n), self.degrees())
        return not np.any(colours[rows] == colours[self.indices])

    def is_clique(self, vertices) -> bool:
        vs = list(vertices)
        return all(self.has_edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])

    def is_stable(self, vertices) -> bool:
        vs = list(vertices)
        return not any(self.has_edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])


@njit(cache=True)
def _component_labels(n, indptr, indices):
    label = -np.ones(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    ncomp = 0
    for s in range(n):
        if label[s] >= 0:
            continue
        label[s] = ncomp
        top = 0
        stack[top] = s
        top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if label[u] < 0:
                    label[u] = ncomp
                    stack[top] = u
                    top += 1
        ncomp += 1
    return label
