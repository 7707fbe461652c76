"""Fractional chromatic number by column generation over stable sets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .clique import degeneracy_order
from .graph import Graph
from .simplex import solve_covering, solve_covering_exact


class ColumnGenerationError(RuntimeError):
    pass


@dataclass
class FractionalSolution:
    sets: list             # stable sets as sorted tuples
    weights: np.ndarray
    objective: float
    dual: np.ndarray       # vertex weights y >= 0
    max_dual_stable: float  # heaviest stable set under ``dual`` (<= 1 + tol)
    iterations: int = 0

    @property
    def dual_objective(self) -> float:
        return float(self.dual.sum())

    def check(self, g: Graph, tol: float = 1e-6) -> None:
        """Raise AssertionError unless both certificates hold."""
        cover = np.zeros(g.n)
        for S, w in zip(self.sets, self.weights):
            assert w >= -tol, "negative weight"
            assert g.is_stable(S), f"listed set {S} is not stable"
            cover[list(S)] += w
        assert np.all(cover >= 1 - tol), "some vertex is covered less than once"
        assert abs(self.weights.sum() - self.objective) <= tol
        assert np.all(self.dual >= -tol)
        assert max_weight_stable_set(g, self.dual)[1] <= 1 + tol, "dual infeasible"
        assert self.objective - self.dual_objective <= tol, "duality gap too large"


# ------------------------------------------------------------------ pricing

def _bitsets(g: Graph) -> list[int]:
    adj = []
    for v in range(g.n):
        m = 0
        for u in g.neighbors(v):
            m |= 1 << int(u)
        adj.append(m)
    return adj


def max_weight_stable_set(g: Graph, weights, adj: list[int] | None = None) -> tuple[list[int], float]:
    """Exact maximum-weight stable set by branch and bound.

    The bound covers the candidates greedily by cliques; a stable set uses at
    most one vertex of each clique.  Branching order is by weight, then lowest
    index, and only strict improvements replace the incumbent, so the result
    is deterministic.
    """
    w = np.asarray(weights, dtype=float)
    n = g.n
    if n == 0:
        return [], 0.0
    if adj is None:
        adj = _bitsets(g)
    order = sorted(range(n), key=lambda v: (-w[v], v))
    pos_order = [v for v in order if w[v] > 0]
    best_set: list[int] = []
    best_w = 0.0

    def clique_cover_bound(cands: list[int]) -> float:
        # cands arrive heaviest first, so a clique's first member is its heaviest
        cliques: list[tuple[int, float]] = []  # (member mask, max weight)
        total = 0.0
        for v in cands:
            for k, (mask, top) in enumerate(cliques):
                if mask & ~adj[v] == 0:
                    cliques[k] = (mask | (1 << v), top)
                    break
            else:
                cliques.append((1 << v, w[v]))
                total += w[v]
        return total

    def search(chosen: list[int], weight: float, cands: list[int]):
        nonlocal best_set, best_w
        if weight > best_w + 1e-12:
            best_w = weight
            best_set = list(chosen)
        if not cands:
            return
        if weight + clique_cover_bound(cands) <= best_w + 1e-12:
            return
        for k, v in enumerate(cands):
            rest = cands[k + 1:]
            chosen.append(v)
            search(chosen, weight + w[v], [u for u in rest if not (adj[v] >> u) & 1])
            chosen.pop()
            if weight + clique_cover_bound(rest) <= best_w + 1e-12:
                return

    search([], 0.0, pos_order)
    return sorted(best_set), float(best_w)


def _greedy_stable(g: Graph, order, adj: list[int]) -> list[int]:
    blocked = 0
    chosen = []
    for v in order:
        v = int(v)
        if not (blocked >> v) & 1:
            chosen.append(v)
            blocked |= adj[v] | (1 << v)
    return sorted(chosen)


def _seed_pool(g: Graph, adj: list[int]) -> list[tuple]:
    n = g.n
    deg = g.degrees()
    sl, _ = degeneracy_order(g)
    orders = [np.arange(n), np.arange(n)[::-1], np.argsort(deg, kind="stable"),
              np.argsort(-deg, kind="stable"), sl]
    pool = [(v,) for v in range(n)]
    seen = set(pool)
    for order in orders:
        S = tuple(_greedy_stable(g, order, adj))
        if S not in seen:
            seen.add(S)
            pool.append(S)
    return pool


# ------------------------------------------------------- column generation

def _solve_component(g: Graph, tol: float, max_iter: int) -> FractionalSolution:
    n = g.n
    adj = _bitsets(g)
    pool = _seed_pool(g, adj)
    seen = set(pool)
    for it in range(1, max_iter + 1):
        A = np.zeros((n, len(pool)))
        for k, S in enumerate(pool):
            A[list(S), k] = 1.0
        lp = solve_covering(A)
        y = np.maximum(lp.y, 0.0)
        # cheap pricing first: greedy by dual weight
        order = sorted(range(n), key=lambda v: (-y[v], v))
        S = tuple(_greedy_stable(g, order, adj))
        val = float(y[list(S)].sum())
        if val <= 1 + tol or S in seen:
            S_list, val = max_weight_stable_set(g, y, adj)
            S = tuple(S_list)
        if val <= 1 + tol:
            keep = lp.x > 1e-12
            sets = [pool[k] for k in np.nonzero(keep)[0]]
            return FractionalSolution(sets, lp.x[keep], float(lp.x.sum()), y, val, it)
        if S in seen:
            raise ColumnGenerationError("pricing returned a column already in the pool")
        seen.add(S)
        pool.append(S)
    raise ColumnGenerationError(f"column generation did not converge in {max_iter} rounds")


def fractional_chromatic(g: Graph, tol: float = 1e-9, max_iter: int = 10_000) -> FractionalSolution:
    """Fractional chromatic number with primal cover and dual vertex weights."""
    if g.n == 0:
        return FractionalSolution([], np.zeros(0), 0.0, np.zeros(0), 0.0)
    parts = []
    for comp in g.components():
        if comp.size == 1:
            sol = FractionalSolution([(0,)], np.ones(1), 1.0, np.ones(1), 1.0, 0)
        else:
            sol = _solve_component(g.subgraph(comp), tol, max_iter)
        parts.append((comp, sol))
    # stack the components' weighted sets along a common [0, objective] axis
    top = max(sol.objective for _, sol in parts)
    breaks = {0.0, top}
    layers = []
    for comp, sol in parts:
        acc = 0.0
        spans = []
        for S, w in zip(sol.sets, sol.weights):
            spans.append((acc, acc + w, tuple(int(comp[v]) for v in S)))
            acc += w
            breaks.add(min(acc, top))
        layers.append(spans)
    pts = sorted(breaks)
    merged: dict[tuple, float] = {}
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0:
            continue
        mid = 0.5 * (a + b)
        members = []
        for spans in layers:
            for lo, hi, S in spans:
                if lo <= mid < hi:
                    members.extend(S)
                    break
        if members:
            key = tuple(sorted(members))
            merged[key] = merged.get(key, 0.0) + (b - a)
    sets = list(merged)
    weights = np.array([merged[S] for S in sets])
    comp, best = max(parts, key=lambda cs: cs[1].objective)
    dual = np.zeros(g.n)
    dual[comp] = best.dual
    iters = sum(sol.iterations for _, sol in parts)
    return FractionalSolution(sets, weights, float(weights.sum()), dual,
                              best.max_dual_stable, iters)


def all_stable_sets(g: Graph) -> list[tuple]:
    """Every nonempty stable set (exponential; intended for tiny graphs)."""
    adj = g.adjacency_sets()
    out = []

    def grow(current: list[int], start: int):
        for v in range(start, g.n):
            if all(v not in adj[u] for u in current):
                current.append(v)
                out.append(tuple(current))
                grow(current, v + 1)
                current.pop()

    grow([], 0)
    return out


def fractional_chromatic_exhaustive(g: Graph) -> Fraction:
    """Exact LP value over all stable sets, in rational arithmetic."""
    if g.n == 0:
        return Fraction(0)
    sets = all_stable_sets(g)
    A = np.zeros((g.n, len(sets)), dtype=int)
    for k, S in enumerate(sets):
        A[list(S), k] = 1
    return solve_covering_exact(A).objective


def dual_bound(points, r: float, norm, phi) -> float:
    """sup_x sum_v phi((v - x) / r): a lower bound on the fractional chromatic number.

    ``phi`` must be a feasible radial function; then the translated values form
    a feasible dual solution for every x.
    """
    from ..scan import scan_radial
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0.0
    return float(scan_radial(pts, phi, r).value)
