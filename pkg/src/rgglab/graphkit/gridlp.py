"""Colouring through cell-count linear programs on shifted windows.

Points are scaled by 1/r and binned into cubes of side ``eps``.  A window of
(2K)^d cells induces a cell graph Gamma0 (cells joined when their corners are
closer than 1 + eps*rho, rho the cube diameter).  Its covering LP over stable
sets, with each cell's demand being its point count divided by (2K)^d, is
solved and the basic solution rounded up.  Windows repeat with period 2K + L
cells (L cells of empty margin keep windows apart), and the (2K + L)^d shifts
of that pattern cover every cell (2K)^d times.  Each cell's points are dealt
round-robin to the shifts covering it, and every shift gets its own palette.

The optimal duals y of the window LPs define step functions (value y_q on cell
q of the window) and the palette is bounded by

    (1 + L/2K)^d * max_y M(V, phi_y) + (2K)^d (2K + L)^d

where M(V, phi) = sup_x sum_v phi(v - x) is computed exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..geometry import NormSpec, pairwise_norms, unit_cube_diameter
from .colouring import ColouringResult, _compact
from .graph import Graph
from .simplex import solve_covering


class GridLPBudgetExceeded(RuntimeError):
    """The cell graph has too many stable sets to enumerate."""


@dataclass(frozen=True)
class CellGraph:
    eps: float
    K: int
    L: int
    offsets: np.ndarray   # (2K)^d x d cell offsets in [-K, K)
    graph: Graph
    stable_sets: list     # tuples of offset indices
    incidence: np.ndarray  # cells x stable sets, 0/1


@dataclass(frozen=True)
class GridLPResult:
    colouring: ColouringResult
    guarantee: float
    max_scan: float               # max over the encountered duals of M(V, phi_y)
    duals: np.ndarray             # distinct dual vectors, one per row
    scan_values: np.ndarray       # M(V, phi_y) for each row of ``duals``
    shift_palettes: np.ndarray    # colours reserved by each shift
    lp_count: int


def cell_graph(norm: NormSpec, eps: float, K: int, max_sets: int = 200_000) -> CellGraph:
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if K < 1:
        raise ValueError("K must be a positive integer")
    d = norm.d
    rho = unit_cube_diameter(norm)
    reach = 1.0 + eps * rho
    L = math.ceil(reach / eps - 1e-12)
    offsets = np.array(list(itertools.product(range(-K, K), repeat=d)), dtype=np.int64)
    m = offsets.shape[0]
    diffs = (offsets[:, None, :] - offsets[None, :, :]).reshape(-1, d) * eps
    dist = pairwise_norms(norm, diffs).reshape(m, m)
    # a hair of slack only adds edges, which keeps the construction safe
    adj = (dist < reach * (1 + 1e-12)) & ~np.eye(m, dtype=bool)
    edges = np.argwhere(np.triu(adj))
    g = Graph.from_edges(m, edges)
    sets = _stable_sets(adj, max_sets)
    B = np.zeros((m, len(sets)))
    for k, S in enumerate(sets):
        B[list(S), k] = 1.0
    return CellGraph(eps, K, L, offsets, g, sets, B)


def _stable_sets(adj: np.ndarray, max_sets: int) -> list:
    m = adj.shape[0]
    masks = [int(sum(1 << int(u) for u in np.nonzero(adj[v])[0])) for v in range(m)]
    out = []

    def grow(current, blocked, start):
        for v in range(start, m):
            if not (blocked >> v) & 1:
                current.append(v)
                out.append(tuple(current))
                if len(out) > max_sets:
                    raise GridLPBudgetExceeded(
                        f"cell graph has more than {max_sets} stable sets")
                grow(current, blocked | masks[v], v + 1)
                current.pop()

    grow([], 0, 0)
    return out


def _round_basic(x: np.ndarray) -> np.ndarray:
    near = np.abs(x - np.round(x)) < 1e-9
    x = np.where(near, np.round(x), x)
    return np.ceil(np.maximum(x, 0.0)).astype(np.int64)


def grid_lp_colouring(points, r: float, norm: NormSpec, eps: float, K: int,
                      max_sets: int = 200_000) -> GridLPResult:
    """Proper colouring of G(points, r) together with its palette guarantee."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != norm.d:
        raise ValueError("points must be an (n, d) array matching the norm")
    if r <= 0:
        raise ValueError("r must be positive")
    cg = cell_graph(norm, eps, K, max_sets)
    d, L = norm.d, cg.L
    side = 2 * K
    period = side + L
    mult = side ** d
    n = pts.shape[0]
    n_shifts = period ** d
    additive = float(mult * n_shifts)
    if n == 0:
        empty = ColouringResult(np.zeros(0, np.int64), 0, "grid-lp")
        return GridLPResult(empty, additive, 0.0, np.zeros((0, mult)), np.zeros(0),
                            np.zeros(n_shifts, np.int64), 0)

    u = pts / (r * eps)
    cells = np.floor(u).astype(np.int64)
    # local position of each offset inside a window, as a flat index
    strides = side ** np.arange(d - 1, -1, -1)
    shifts = np.array(list(itertools.product(range(-K, K + L), repeat=d)), dtype=np.int64)

    # deal each cell's points round-robin to the shifts that cover the cell
    owner = np.empty(n, dtype=np.int64)
    order = np.lexsort(cells.T[::-1])
    sorted_cells = cells[order]
    change = np.any(sorted_cells[1:] != sorted_cells[:-1], axis=1)
    starts = np.concatenate([[0], np.nonzero(change)[0] + 1, [n]])
    for a, b in zip(starts[:-1], starts[1:]):
        q = sorted_cells[a]
        covering = np.nonzero(np.all((q - shifts + K) % period < side, axis=1))[0]
        assert covering.size == mult
        for rank, v in enumerate(order[a:b]):
            owner[v] = covering[rank % mult]

    uniq, cnt = np.unique(cells, axis=0, return_counts=True)
    cell_count = {tuple(c): int(k) for c, k in zip(uniq.tolist(), cnt)}

    colours = np.empty(n, dtype=np.int64)
    palettes = np.zeros(n_shifts, dtype=np.int64)
    lp_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
    duals: dict[tuple, np.ndarray] = {}
    lp_count = 0
    base = 0
    for s in range(n_shifts):
        members = np.nonzero(owner == s)[0]
        if members.size == 0:
            continue
        rel = cells[members] - shifts[s] + K
        window = rel // period
        local = (rel % period) @ strides
        wkeys = [tuple(w) for w in window]
        by_window: dict[tuple, list[int]] = {}
        for idx, key in enumerate(wkeys):
            by_window.setdefault(key, []).append(idx)
        palette = 0
        for key in sorted(by_window):
            idxs = by_window[key]
            # the window demands each cell's full count; the LP gets 1/(2K)^d of it
            corner = np.array(key) * period + shifts[s] - K
            full = np.array([cell_count.get(tuple(corner + o + K), 0) for o in cg.offsets],
                            dtype=np.int64)
            cell_ids = local[idxs]
            ckey = tuple(full.tolist())
            if ckey not in lp_cache:
                lp = solve_covering(cg.incidence, full / mult)
                lp_count += 1
                lp_cache[ckey] = (_round_basic(lp.x), np.maximum(lp.y, 0.0))
            xr, y = lp_cache[ckey]
            duals.setdefault(tuple(np.round(y, 12).tolist()), y)
            # colour slots: stable set k repeated xr[k] times; cells of one
            # stable set may share a slot, points of one cell may not
            slot_sets = np.repeat(np.arange(xr.size), xr)
            for lc in range(mult):
                take = [members[idxs[i]] for i in range(len(idxs)) if cell_ids[i] == lc]
                if not take:
                    continue
                free = np.nonzero(cg.incidence[lc, slot_sets] > 0)[0]
                if len(free) < len(take):
                    raise AssertionError("rounded LP solution does not cover a cell")
                for v, k in zip(take, free):
                    colours[v] = base + k
            palette = max(palette, int(slot_sets.size))
        palettes[s] = palette
        base += palette

    Y = np.array(list(duals.values()))
    scans = step_scan_values(pts / r, Y, cg.offsets, eps, K)
    max_scan = float(scans.max()) if scans.size else 0.0
    guarantee = (period / side) ** d * max_scan + additive
    result = ColouringResult(_compact(colours), int(np.unique(colours).size), "grid-lp")
    return GridLPResult(result, guarantee, max_scan, Y, scans, palettes, lp_count)


# ------------------------------------------------------------ exact scanning

def step_value_at(scaled, y, offsets, eps: float, K: int, x) -> float:
    """sum_v phi(v - x) for the step function with value y[j] on cube eps*(offsets[j] + [0,1)^d)."""
    q = np.floor((np.asarray(scaled) - np.asarray(x)) / eps).astype(np.int64)
    table = {tuple(o): float(v) for o, v in zip(offsets, y)}
    return float(sum(table.get(tuple(c), 0.0) for c in q))


def step_scan_values(scaled, Y, offsets, eps: float, K: int) -> np.ndarray:
    """M(V, phi) for each row of ``Y``, exactly.

    Writing x = eps*(k + a) with k integer and a in [0, 1)^d, a point's cell
    relative to x depends on a only through which points have fractional
    part below a in each coordinate, so the candidates for a are the points'
    own fractional parts.  The leading coordinates are enumerated and the last
    one is swept, moving one tie group of points down a cell at a time.
    """
    scaled = np.asarray(scaled, dtype=float)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if scaled.shape[0] == 0 or Y.shape[0] == 0:
        return np.zeros(Y.shape[0])
    u = scaled / eps
    base = np.floor(u).astype(np.int64)
    frac = u - base
    d = base.shape[1]
    lo = base.min(axis=0) - K
    dims = base.max(axis=0) - base.min(axis=0) + 2 * K + 1
    outer = []
    for j in range(d - 1):
        outer.append(np.unique(frac[:, j]))
    counts = np.array([o.size for o in outer] + [1], dtype=np.int64)
    last_order = np.argsort(frac[:, d - 1], kind="stable")
    fl = frac[last_order, d - 1]
    group_end = np.concatenate([np.nonzero(fl[1:] != fl[:-1])[0] + 1, [fl.size]])
    max_outer = np.zeros((max(d - 1, 1), max(int(counts[:-1].max()) if d > 1 else 1, 1)))
    for j, o in enumerate(outer):
        max_outer[j, :o.size] = o
    return _step_scan(base, frac, Y, offsets.astype(np.int64), lo, dims.astype(np.int64),
                      max_outer, counts, last_order, group_end)


@njit(cache=True)
def _step_scan(base, frac, Y, offsets, lo, dims, thresholds, counts, last_order, group_end):
    n, d = base.shape
    m, P = Y.shape
    size = 1
    for j in range(d):
        size *= dims[j]
    strides = np.ones(d, dtype=np.int64)
    for j in range(d - 2, -1, -1):
        strides[j] = strides[j + 1] * dims[j + 1]
    # flat displacement of each window offset
    off_flat = np.zeros(P, dtype=np.int64)
    for li in range(P):
        for j in range(d):
            off_flat[li] += offsets[li, j] * strides[j]
    best = np.zeros(m)
    S = np.zeros((m, size))
    cell_flat = np.zeros(n, dtype=np.int64)
    touched = np.empty(n * P, dtype=np.int64)
    pick = np.zeros(max(d - 1, 1), dtype=np.int64)
    n_outer = 1
    for j in range(d - 1):
        n_outer *= counts[j]
    for it in range(n_outer):
        rem = it
        for j in range(d - 2, -1, -1):
            pick[j] = rem % counts[j]
            rem //= counts[j]
        for i in range(n):
            f = 0
            for j in range(d):
                c = base[i, j]
                if j < d - 1 and frac[i, j] < thresholds[j, pick[j]]:
                    c -= 1
                f += (c - lo[j]) * strides[j]
            cell_flat[i] = f
        S[:, :] = 0.0
        for i in range(n):
            for li in range(P):
                k = cell_flat[i] - off_flat[li]
                for a in range(m):
                    S[a, k] += Y[a, li]
        for a in range(m):
            for k in range(size):
                if S[a, k] > best[a]:
                    best[a] = S[a, k]
        # sweep the last coordinate: each tie group drops one cell
        g0 = 0
        for ge in group_end[:-1]:
            nt = 0
            for idx in range(g0, ge):
                i = last_order[idx]
                old = cell_flat[i]
                new = old - strides[d - 1]
                for li in range(P):
                    ko = old - off_flat[li]
                    kn = new - off_flat[li]
                    for a in range(m):
                        S[a, ko] -= Y[a, li]
                        S[a, kn] += Y[a, li]
                    touched[nt] = kn
                    nt += 1
                cell_flat[i] = new
            for t in range(nt):
                k = touched[t]
                for a in range(m):
                    if S[a, k] > best[a]:
                        best[a] = S[a, k]
            g0 = ge
    return best
