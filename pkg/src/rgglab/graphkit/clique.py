"""Exact maximum clique.

Two exact routes:

* ``bnb``: branch and bound with a greedy-colouring bound, run on the forward
  neighbourhood of each vertex in degeneracy order (bitsets as Python ints).
* ``lens``: for Euclidean unit-disk graphs in the plane.  If u, v are the
  farthest pair of a maximum clique, the clique lies in the lens
  {w : |wu| <= |uv|, |wv| <= |uv|}.  Each half of the lens, split by the line
  uv, has diameter at most |uv|, so the far-apart pairs form a bipartite graph
  and the largest clique with diameter pair (u, v) is 2 + |lens| minus a
  maximum matching.  Cheap counting and height bounds skip most pairs.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .graph import Graph


# --------------------------------------------------------- degeneracy order

@njit(cache=True)
def _degeneracy(n, indptr, indices):
    """Smallest-last order and core numbers via bucket queue."""
    deg = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] > maxdeg:
            maxdeg = deg[v]
    # bucket sort by degree
    bin_start = np.zeros(maxdeg + 2, dtype=np.int64)
    for v in range(n):
        bin_start[deg[v] + 1] += 1
    for k in range(1, maxdeg + 2):
        bin_start[k] += bin_start[k - 1]
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    fill = bin_start.copy()
    for v in range(n):
        pos[v] = fill[deg[v]]
        vert[pos[v]] = v
        fill[deg[v]] += 1
    core = np.empty(n, dtype=np.int64)
    for i in range(n):
        v = vert[i]
        core[v] = deg[v]
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_start[du] += 1
                deg[u] -= 1
    return vert, core


def degeneracy_order(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """(order, core numbers); order removes a minimum-degree vertex at each step."""
    if g.n == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return _degeneracy(g.n, g.indptr, g.indices)


# --------------------------------------------------------- branch and bound

def _colour_bound(p_mask: int, adj: list[int]) -> tuple[list[int], list[int]]:
    """Greedy colour classes of the vertex set p_mask; returns vertices and their colours."""
    order, colours = [], []
    uncoloured = p_mask
    colour = 0
    while uncoloured:
        colour += 1
        avail = uncoloured
        while avail:
            low = avail & -avail
            v = low.bit_length() - 1
            avail &= ~low & ~adj[v]
            uncoloured &= ~low
            order.append(v)
            colours.append(colour)
    return order, colours


def _max_clique_local(adj: list[int], m: int, lower: int) -> list[int]:
    """Largest clique of size > lower in a graph on m vertices given by bitmasks."""
    best: list[int] = []
    best_size = lower

    def expand(r: list[int], p_mask: int):
        nonlocal best, best_size
        order, colours = _colour_bound(p_mask, adj)
        for k in range(len(order) - 1, -1, -1):
            if len(r) + colours[k] <= best_size:
                return
            v = order[k]
            r.append(v)
            new_p = p_mask & adj[v]
            if new_p:
                expand(r, new_p)
            elif len(r) > best_size:
                best_size = len(r)
                best = list(r)
            r.pop()
            p_mask &= ~(1 << v)

    expand([], (1 << m) - 1)
    return best


def _clique_bnb(g: Graph, lower: int = 0) -> list[int]:
    order, core = degeneracy_order(g)
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    best: list[int] = []
    best_size = max(lower, 1 if g.n else 0)
    if g.n and lower <= 1:
        best = [int(order[0])]
    for v in order[::-1]:
        v = int(v)
        if core[v] + 1 <= best_size:
            continue
        nb = g.neighbors(v)
        fwd = nb[rank[nb] > rank[v]]
        if fwd.size + 1 <= best_size:
            continue
        local = fwd.tolist()
        index = {u: k for k, u in enumerate(local)}
        adj = []
        for u in local:
            mask = 0
            for w in g.neighbors(u):
                k = index.get(int(w))
                if k is not None:
                    mask |= 1 << k
            adj.append(mask)
        sub = _max_clique_local(adj, len(local), best_size - 1)
        if len(sub) + 1 > best_size:
            best_size = len(sub) + 1
            best = [v] + [local[k] for k in sub]
    return sorted(best)


# --------------------------------------------------------------- lens method

@njit(cache=True)
def _augment(adj, na, nb, match_a, match_b, target):
    """Grow a bipartite matching by augmenting paths until it reaches ``target``."""
    size = 0
    for a in range(na):
        if match_a[a] >= 0:
            size += 1
    stack_a = np.empty(na + 1, dtype=np.int64)
    stack_b = np.empty(na + 1, dtype=np.int64)
    it = np.empty(na, dtype=np.int64)
    visited = np.zeros(nb, dtype=np.int64)
    stamp = 0
    for root in range(na):
        if size >= target:
            break
        if match_a[root] >= 0:
            continue
        stamp += 1
        top = 0
        stack_a[0] = root
        it[root] = 0
        found = -1
        while top >= 0:
            a = stack_a[top]
            advanced = False
            while it[a] < nb:
                b = it[a]
                it[a] += 1
                if adj[a, b] and visited[b] != stamp:
                    visited[b] = stamp
                    stack_b[top] = b
                    if match_b[b] < 0:
                        found = top
                        break
                    a2 = match_b[b]
                    top += 1
                    stack_a[top] = a2
                    it[a2] = 0
                    advanced = True
                    break
            if found >= 0:
                break
            if not advanced:
                top -= 1
        if found >= 0:
            for lvl in range(found, -1, -1):
                a = stack_a[lvl]
                b = stack_b[lvl]
                match_a[a] = b
                match_b[b] = a
            size += 1
    return size


@njit(cache=True)
def _kuhn(adj, na, nb):
    """Maximum bipartite matching; adj is an (na, nb) boolean matrix."""
    match_b = -np.ones(nb, dtype=np.int64)
    match_a = -np.ones(na, dtype=np.int64)
    for a in range(na):
        for b in range(nb):
            if adj[a, b] and match_b[b] < 0:
                match_b[b] = a
                match_a[a] = b
                break
    size = _augment(adj, na, nb, match_a, match_b, na + nb + 1)
    return size, match_a


_NBINS = 64


@njit(cache=True)
def _histogram_matching(cp, cm, nbins):
    """Greedy matching between height bins whose lower edges already sum beyond D."""
    i = 0
    j = nbins - 1
    ra = cp[0]
    rb = cm[nbins - 1]
    total = 0
    while i < nbins and j >= 0:
        if ra == 0:
            i += 1
            if i < nbins:
                ra = cp[i]
            continue
        if rb == 0:
            j -= 1
            if j >= 0:
                rb = cm[j]
            continue
        if i + j >= nbins + 1:
            m = ra if ra < rb else rb
            total += m
            ra -= m
            rb -= m
        else:
            # nothing left on the other side reaches bin i
            i += 1
            if i < nbins:
                ra = cp[i]
    return total


@njit(cache=True)
def _lens_search(x, indptr, indices, start_best, visit):
    n = x.shape[0]
    best = start_best
    best_u = -1
    best_v = -1
    maxdeg = 0
    for u in range(n):
        if indptr[u + 1] - indptr[u] > maxdeg:
            maxdeg = indptr[u + 1] - indptr[u]
    d2 = np.empty(maxdeg, dtype=np.float64)
    rx = np.empty(maxdeg, dtype=np.float64)
    ry = np.empty(maxdeg, dtype=np.float64)
    sid = np.empty(maxdeg, dtype=np.int64)
    hp = np.empty(maxdeg, dtype=np.float64)
    hm = np.empty(maxdeg, dtype=np.float64)
    ip = np.empty(maxdeg, dtype=np.int64)
    im = np.empty(maxdeg, dtype=np.int64)
    cp = np.zeros(_NBINS, dtype=np.int64)
    cm = np.zeros(_NBINS, dtype=np.int64)
    scale = _NBINS * (1.0 - 1e-12)
    for u in visit:
        lo = indptr[u]
        deg = indptr[u + 1] - lo
        if deg + 1 <= best:
            continue
        for k in range(deg):
            w = indices[lo + k]
            dx = x[w, 0] - x[u, 0]
            dy = x[w, 1] - x[u, 1]
            d2[k] = dx * dx + dy * dy
        perm = np.argsort(d2[:deg], kind="mergesort")
        sd2 = d2[:deg][perm]
        for k in range(deg):
            w = indices[lo + perm[k]]
            sid[k] = w
            rx[k] = x[w, 0] - x[u, 0]
            ry[k] = x[w, 1] - x[u, 1]
        for kv in range(deg):
            v = sid[kv]
            if v < u:
                continue
            D2 = sd2[kv]
            upper = kv
            while upper + 1 < deg and sd2[upper + 1] <= D2:
                upper += 1
            # neighbours of u within D other than v
            if 2 + upper <= best:
                continue
            ex = rx[kv]
            ey = ry[kv]
            # lens size (v itself is counted once by the reduction)
            L = -1
            for k in range(upper + 1):
                fx = rx[k] - ex
                fy = ry[k] - ey
                L += fx * fx + fy * fy <= D2
            if 2 + L <= best:
                continue
            D = math.sqrt(D2)
            inv = scale / D
            for b in range(_NBINS):
                cp[b] = 0
                cm[b] = 0
            npl = 0
            nmi = 0
            for k in range(upper + 1):
                fx = rx[k] - ex
                fy = ry[k] - ey
                if fx * fx + fy * fy > D2 or k == kv:
                    continue
                h = (ex * ry[k] - ey * rx[k]) / D
                if h >= 0.0:
                    hp[npl] = h
                    ip[npl] = k
                    npl += 1
                    bn = int(h * inv)
                    cp[bn if bn < _NBINS else _NBINS - 1] += 1
                else:
                    hm[nmi] = -h
                    im[nmi] = k
                    nmi += 1
                    bn = int(-h * inv)
                    cm[bn if bn < _NBINS else _NBINS - 1] += 1
            if npl > 0 and nmi > 0:
                if 2 + L - _histogram_matching(cp, cm, _NBINS) <= best:
                    continue
                # certain conflicts: heights on opposite sides summing beyond D,
                # matched greedily (ascending on one side, descending on the other)
                pa = np.argsort(hp[:npl])
                pb = np.argsort(hm[:nmi])
                match_a = -np.ones(npl, dtype=np.int64)
                match_b = -np.ones(nmi, dtype=np.int64)
                j = nmi - 1
                tm = 0
                lim = D * (1.0 + 1e-9)
                for i in range(npl):
                    if j < 0:
                        break
                    if hp[pa[i]] + hm[pb[j]] > lim:
                        match_a[pa[i]] = pb[j]
                        match_b[pb[j]] = pa[i]
                        tm += 1
                        j -= 1
                if 2 + L - tm <= best:
                    continue
                adj = np.zeros((npl, nmi), dtype=np.bool_)
                for i in range(npl):
                    ki = ip[i]
                    for jj in range(nmi):
                        kj = im[jj]
                        gx = rx[ki] - rx[kj]
                        gy = ry[ki] - ry[kj]
                        if gx * gx + gy * gy > D2:
                            adj[i, jj] = True
                # stop once the matching is large enough to rule this pair out
                nu = _augment(adj, npl, nmi, match_a, match_b, L + 2 - best)
                val = 2 + L - nu
            else:
                val = 2 + L
            if val > best:
                best = val
                best_u = u
                best_v = v
    return best, best_u, best_v


@njit(cache=True)
def _half_radius_counts(x, indptr, indices, r):
    """Points in the closed ball of radius r/2 around each data point (itself included)."""
    n = x.shape[0]
    q = 0.25 * r * r
    counts = np.ones(n, dtype=np.int64)
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            dx = x[w, 0] - x[u, 0]
            dy = x[w, 1] - x[u, 1]
            if dx * dx + dy * dy <= q:
                counts[u] += 1
    return counts


def _lens_members(x, g: Graph, u: int, v: int):
    """Lens split by the line uv, using the same arithmetic as the search kernel."""
    nb = g.neighbors(u).astype(np.int64)
    rel = x[nb] - x[u]
    e = x[v] - x[u]
    D2 = float(e[0] * e[0] + e[1] * e[1])
    f = rel - e
    keep = (f[:, 0] * f[:, 0] + f[:, 1] * f[:, 1] <= D2) & (nb != v)
    keep &= rel[:, 0] * rel[:, 0] + rel[:, 1] * rel[:, 1] <= D2
    lens, rel = nb[keep], rel[keep]
    h = (e[0] * rel[:, 1] - e[1] * rel[:, 0]) / math.sqrt(D2)
    return lens[h >= 0], rel[h >= 0], lens[h < 0], rel[h < 0], D2


def _lens_witness(x, g: Graph, u: int, v: int) -> list[int]:
    """Maximum independent set of the conflict graph via Konig's theorem."""
    plus, rel_p, minus, rel_m, D2 = _lens_members(x, g, u, v)
    if plus.size == 0 or minus.size == 0:
        return sorted([u, v] + plus.tolist() + minus.tolist())
    diff = rel_p[:, None, :] - rel_m[None, :, :]
    adj = (diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1]) > D2
    _, match_a = _kuhn(adj, plus.size, minus.size)
    match_b = -np.ones(minus.size, dtype=np.int64)
    for a, b in enumerate(match_a):
        if b >= 0:
            match_b[b] = a
    # alternating reachability from unmatched left vertices
    seen_a = np.zeros(plus.size, bool)
    seen_b = np.zeros(minus.size, bool)
    stack = [a for a in range(plus.size) if match_a[a] < 0]
    for a in stack:
        seen_a[a] = True
    while stack:
        a = stack.pop()
        for b in np.nonzero(adj[a])[0]:
            if not seen_b[b]:
                seen_b[b] = True
                a2 = match_b[b]
                if a2 >= 0 and not seen_a[a2]:
                    seen_a[a2] = True
                    stack.append(a2)
    # cover = (left not reached) + (right reached); independent set is its complement
    chosen = plus[seen_a].tolist() + minus[~seen_b].tolist()
    return sorted([u, v] + chosen)


def _clique_lens(g) -> list[int]:
    x = np.ascontiguousarray(g.points, dtype=np.float64)
    if g.n == 0:
        return []
    # any ball of radius r/2 is a clique; dense spots first makes pruning bite early
    counts = _half_radius_counts(x, g.indptr, g.indices, g.r)
    centre = int(np.argmax(counts))
    if g.num_edges == 0:
        return [0]
    visit = np.argsort(-counts, kind="stable")
    best, bu, bv = _lens_search(x, g.indptr, g.indices, int(counts[centre]), visit)
    if bu < 0:
        q = 0.25 * g.r * g.r
        nb = g.neighbors(centre)
        close = nb[((x[nb] - x[centre]) ** 2).sum(axis=1) <= q]
        return sorted([int(centre)] + close.tolist())
    witness = _lens_witness(x, g, int(bu), int(bv))
    if len(witness) != best:
        raise RuntimeError("lens witness size disagrees with the search value")
    return witness


def clique_number(g: Graph, method: str = "auto") -> tuple[int, list[int]]:
    """Exact clique number and a witness clique (sorted vertex list)."""
    if method not in ("auto", "bnb", "lens"):
        raise ValueError(f"unknown method {method!r}")
    geometric_plane = (getattr(g, "norm", None) is not None and g.norm.is_euclidean
                       and g.norm.d == 2)
    if method == "lens" and not geometric_plane:
        raise ValueError("the lens method needs a Euclidean geometric graph in the plane")
    if method == "lens" or (method == "auto" and geometric_plane and g.n > 150):
        witness = _clique_lens(g)
        if not g.is_clique(witness):
            # rounding on the splitting line; fall back to the generic search
            witness = _clique_bnb(g)
    else:
        witness = _clique_bnb(g)
    return len(witness), witness
