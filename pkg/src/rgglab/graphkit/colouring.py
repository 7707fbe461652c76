"""Greedy, DSATUR and exact vertex colouring."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .clique import clique_number, degeneracy_order
from .graph import Graph


class ExactUnavailable(RuntimeError):
    """The exact search exceeded its node budget; fall back to bounds."""


@dataclass(frozen=True)
class ColouringResult:
    colours: np.ndarray
    palette: int
    method: str  # exact | greedy | grid-lp

    def __post_init__(self):
        c = np.asarray(self.colours, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "colours", c)
        used = int(np.unique(c).size) if c.size else 0
        if used != self.palette:
            raise ValueError(f"palette {self.palette} but {used} colours used")


def _compact(colours: np.ndarray) -> np.ndarray:
    """Relabel colours to 0..k-1 in order of first appearance."""
    if colours.size == 0:
        return colours.astype(np.int64)
    _, first, inv = np.unique(colours, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[inv]


@njit(cache=True)
def _first_fit(n, indptr, indices, order):
    colours = -np.ones(n, dtype=np.int64)
    mark = -np.ones(n + 1, dtype=np.int64)
    for v in order:
        for k in range(indptr[v], indptr[v + 1]):
            c = colours[indices[k]]
            if c >= 0:
                mark[c] = v
        c = 0
        while mark[c] == v:
            c += 1
        colours[v] = c
    return colours


def greedy_colouring(g: Graph, order=None) -> ColouringResult:
    """First-fit colouring along ``order`` (natural order by default)."""
    if g.n == 0:
        return ColouringResult(np.zeros(0, np.int64), 0, "greedy")
    order = np.arange(g.n) if order is None else np.asarray(order, dtype=np.int64)
    colours = _first_fit(g.n, g.indptr, g.indices, order)
    return ColouringResult(colours, int(colours.max()) + 1, "greedy")


def grid_cell_order(g: Graph) -> np.ndarray:
    """Vertices sorted lexicographically by the grid cell (side r) holding their point."""
    pts = getattr(g, "points", None)
    if pts is None or g.n == 0:
        return np.arange(g.n)
    cells = np.floor(pts / g.r).astype(np.int64)
    return np.lexsort(cells.T[::-1])


def smallest_last_order(g: Graph) -> np.ndarray:
    order, _ = degeneracy_order(g)
    return order[::-1].copy()


def best_greedy(g: Graph) -> ColouringResult:
    """Fewest colours over natural, grid-cell, smallest-last and largest-first orders."""
    orders = [np.arange(g.n), grid_cell_order(g), smallest_last_order(g),
              np.argsort(-g.degrees(), kind="stable")]
    best = None
    for order in orders:
        res = greedy_colouring(g, order)
        if best is None or res.palette < best.palette:
            best = res
    return best


# ------------------------------------------------------------------- DSATUR

def dsatur(g: Graph) -> ColouringResult:
    """DSATUR greedy: most saturated vertex first, ties by degree then lowest index."""
    n = g.n
    if n == 0:
        return ColouringResult(np.zeros(0, np.int64), 0, "greedy")
    colours = -np.ones(n, dtype=np.int64)
    sat = [set() for _ in range(n)]
    deg = g.degrees()
    for _ in range(n):
        best_v, best_key = -1, None
        for v in range(n):
            if colours[v] < 0:
                key = (len(sat[v]), deg[v], -v)
                if best_key is None or key > best_key:
                    best_v, best_key = v, key
        c = 0
        while c in sat[best_v]:
            c += 1
        colours[best_v] = c
        for u in g.neighbors(best_v):
            sat[u].add(c)
    return ColouringResult(colours, int(colours.max()) + 1, "greedy")


def _two_colour(g: Graph):
    colours = -np.ones(g.n, dtype=np.int64)
    for s in range(g.n):
        if colours[s] >= 0:
            continue
        colours[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for u in g.neighbors(v):
                if colours[u] < 0:
                    colours[u] = 1 - colours[v]
                    stack.append(int(u))
                elif colours[u] == colours[v]:
                    return None
    return colours


def _dsatur_exact(g: Graph, lower: int, upper_colouring: np.ndarray, budget: int):
    """Search for a colouring with fewer colours than the incumbent; returns the best found."""
    n = g.n
    nbrs = [g.neighbors(v).tolist() for v in range(n)]
    deg = [len(a) for a in nbrs]
    best = upper_colouring.copy()
    best_k = int(best.max()) + 1
    colours = [-1] * n
    # per-vertex counts of each neighbouring colour
    counts = [dict() for _ in range(n)]
    nodes = 0

    def pick():
        bv, bkey = -1, None
        for v in range(n):
            if colours[v] < 0:
                key = (len(counts[v]), deg[v], -v)
                if bkey is None or key > bkey:
                    bv, bkey = v, key
        return bv

    def assign(v, c, sign):
        for u in nbrs[v]:
            cu = counts[u]
            if sign > 0:
                cu[c] = cu.get(c, 0) + 1
            else:
                cu[c] -= 1
                if cu[c] == 0:
                    del cu[c]

    def search(coloured: int, used: int):
        nonlocal best, best_k, nodes
        nodes += 1
        if nodes > budget:
            raise ExactUnavailable(f"exact colouring exceeded {budget} search nodes")
        if coloured == n:
            best = np.array(colours, dtype=np.int64)
            best_k = used
            return
        v = pick()
        if len(counts[v]) >= best_k - 1:
            return
        for c in range(min(used + 1, best_k - 1)):
            if c in counts[v]:
                continue
            colours[v] = c
            assign(v, c, +1)
            search(coloured + 1, max(used, c + 1))
            assign(v, c, -1)
            colours[v] = -1
            if best_k <= lower:
                return

    if best_k > lower:
        search(0, 0)
    return best, best_k


def chromatic_number_exact(g: Graph, node_budget: int = 200_000,
                           max_component: int = 200) -> tuple[int, ColouringResult]:
    """Exact chromatic number, solved per connected component.

    Raises :class:`ExactUnavailable` if a component is larger than
    ``max_component`` and no shortcut applies, or the search runs out of nodes.
    """
    colours = np.zeros(g.n, dtype=np.int64)
    chi = 0
    for comp in g.components():
        if comp.size == 1:
            chi = max(chi, 1)
            continue
        sub = g.subgraph(comp)
        omega, _ = clique_number(sub)
        delta = sub.max_degree()
        if delta + 1 == omega:
            local = best_greedy(sub).colours  # at most delta + 1 colours
            k = int(local.max()) + 1
        elif omega == 2 and (two := _two_colour(sub)) is not None:
            local, k = two, 2
        else:
            lower = max(omega, 3) if omega == 2 else omega
            start = dsatur(sub)
            alt = best_greedy(sub)
            start = alt if alt.palette < start.palette else start
            if start.palette <= lower:
                local, k = start.colours, start.palette
            else:
                if comp.size > max_component:
                    raise ExactUnavailable(
                        f"component of {comp.size} vertices exceeds the exact-search cap")
                local, k = _dsatur_exact(sub, lower, start.colours, node_budget)
        colours[comp] = local
        chi = max(chi, k)
    colours = _compact(colours)
    return chi, ColouringResult(colours, chi, "exact")


@njit(cache=True)
def _greedy_clique_kernel(n, indptr, indices, starts, rank):
    mark = np.zeros(n, dtype=np.int64)
    best = np.zeros(0, dtype=np.int64)
    cand = np.empty(n, dtype=np.int64)
    stamp = 0
    for s in starts:
        if indptr[s + 1] - indptr[s] + 1 <= best.size:
            continue
        clique = [s]
        m = 0
        for k in range(indptr[s], indptr[s + 1]):
            cand[m] = indices[k]
            m += 1
        while m > 0:
            # deepest remaining candidate in the degeneracy order
            pick = 0
            for k in range(1, m):
                if rank[cand[k]] > rank[cand[pick]]:
                    pick = k
            w = cand[pick]
            clique.append(w)
            stamp += 1
            for k in range(indptr[w], indptr[w + 1]):
                mark[indices[k]] = stamp
            m2 = 0
            for k in range(m):
                if mark[cand[k]] == stamp:
                    cand[m2] = cand[k]
                    m2 += 1
            m = m2
        if len(clique) > best.size:
            best = np.array(clique, dtype=np.int64)
    return best


def greedy_clique(g: Graph, tries: int = 64) -> list[int]:
    """A maximal clique grown greedily from the highest-core vertices."""
    if g.n == 0:
        return []
    order, _ = degeneracy_order(g)
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    starts = order[::-1][:tries].copy()
    return sorted(_greedy_clique_kernel(g.n, g.indptr, g.indices, starts, rank).tolist())


@dataclass(frozen=True)
class ChromaticBounds:
    lower: int
    upper: int
    clique: list
    dual_value: float
    colouring: ColouringResult


def chromatic_bounds(g: Graph, dual_value: float | None = None) -> ChromaticBounds:
    """(lower, upper) on the chromatic number.

    The lower bound combines a greedy clique with a fractional dual value; for
    geometric graphs the dual defaults to the largest count in a ball of
    radius r/2.  The upper bound is the best of several greedy orders.
    """
    clique = greedy_clique(g)
    if dual_value is None:
        dual_value = _default_dual(g)
    lower = max(len(clique), math.ceil(dual_value - 1e-9))
    col = best_greedy(g)
    if col.palette < lower:
        raise AssertionError("greedy colouring beat a lower bound; inconsistent input")
    return ChromaticBounds(lower, col.palette, clique, float(dual_value), col)


def _default_dual(g: Graph) -> float:
    if getattr(g, "norm", None) is None or g.n == 0:
        return 0.0
    from .fractional import dual_bound
    from ..limits import phi_zero
    return dual_bound(g.points, g.r, g.norm, phi_zero(g.norm))
