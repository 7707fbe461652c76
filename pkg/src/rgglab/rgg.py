"""Point sampling and geometric graph construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .geometry import NormSpec
from .graphkit.graph import Graph
from .rng import uniforms


@dataclass(frozen=True)
class DensityModel:
    """Bounded density on [0, 1]^d.

    ``kind`` is ``"uniform-cube"`` or ``"block-density"``.  A block density is
    constant on each cell of a regular m^d grid; ``blocks`` holds the density
    values with shape (m,) * d.
    """

    kind: str
    d: int
    blocks: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("uniform-cube", "block-density"):
            raise ValueError(f"unknown density model {self.kind!r}")
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if self.kind == "block-density":
            if self.blocks is None:
                raise ValueError("block-density needs a block array")
            b = np.asarray(self.blocks, dtype=float)
            m = b.shape[0]
            if b.ndim != self.d or any(s != m for s in b.shape):
                raise ValueError("blocks must have shape (m,) * d")
            if np.any(b < 0):
                raise ValueError("density values must be nonnegative")
            mass = b.sum() / m ** self.d
            if abs(mass - 1.0) > 1e-12:
                raise ValueError(f"density must integrate to 1, got mass {mass!r}")
            b = b.copy()
            b.setflags(write=False)
            object.__setattr__(self, "blocks", b)

    @classmethod
    def uniform(cls, d: int) -> "DensityModel":
        return cls("uniform-cube", d)

    @classmethod
    def half_cube(cls, d: int) -> "DensityModel":
        """Density 2 on [0, 1/2] x [0, 1]^(d-1), zero elsewhere."""
        b = np.zeros((2,) * d)
        b[0] = 2.0
        return cls("block-density", d, b)

    @property
    def sigma(self) -> float:
        if self.kind == "uniform-cube":
            return 1.0
        return float(self.blocks.max())

    def describe(self) -> str:
        if self.kind == "uniform-cube":
            return "uniform-cube"
        return f"block-density(m={self.blocks.shape[0]}, sigma={self.sigma:g})"


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    seed: int
    model: DensityModel | None = None
    density_sup: float | None = None  # used when no model is attached

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def sigma(self) -> float:
        if self.model is not None:
            return self.model.sigma
        return 1.0 if self.density_sup is None else float(self.density_sup)


def sample_points(model: DensityModel, n: int, seed: int) -> PointCloud:
    """Draw n i.i.d. points; draw counters are laid out per point in a fixed order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    d = model.d
    if model.kind == "uniform-cube":
        u = uniforms(seed, np.arange(n * d, dtype=np.uint64)).reshape(n, d)
        return PointCloud(u, seed, model)
    # block model: draw 0 picks the cell, draws 1..d place the point inside it
    u = uniforms(seed, np.arange(n * (d + 1), dtype=np.uint64)).reshape(n, d + 1)
    b = model.blocks
    m = b.shape[0]
    probs = b.ravel() / b.sum()
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    cell = np.searchsorted(cum, u[:, 0], side="right")
    # never land in a zero-mass cell through rounding
    cell = np.minimum(cell, probs.size - 1)
    idx = np.stack(np.unravel_index(cell, b.shape), axis=1)
    pts = (idx + u[:, 1:]) / m
    return PointCloud(pts, seed, model)


def radius_for_t(n: float, t: float, sigma: float, d: int) -> float:
    """Radius with sigma n r^d / ln n = t."""
    if n < 3 or t <= 0 or sigma <= 0:
        raise ValueError("need n >= 3, t > 0, sigma > 0")
    return (t * math.log(n) / (sigma * n)) ** (1.0 / d)


class GeometricGraph(Graph):
    def __init__(self, cloud: PointCloud, r: float, norm: NormSpec,
                 indptr: np.ndarray, indices: np.ndarray):
        super().__init__(cloud.n, indptr, indices)
        self.cloud = cloud
        self.r = float(r)
        self.norm = norm

    @property
    def points(self) -> np.ndarray:
        return self.cloud.points


def _norm_code(norm: NormSpec) -> tuple[int, float]:
    if norm.is_max_norm:
        return 0, 0.0
    if norm.p == 1.0:
        return 1, 1.0
    if norm.p == 2.0:
        return 2, 2.0
    return 3, norm.p


@njit(cache=True)
def _within(x, i, j, code, p, thresh):
    d = x.shape[1]
    acc = 0.0
    for k in range(d):
        diff = abs(x[i, k] - x[j, k])
        if code == 0:
            if diff > acc:
                acc = diff
        elif code == 1:
            acc += diff
        elif code == 2:
            acc += diff * diff
        else:
            acc += diff ** p
    return acc <= thresh


@njit(cache=True)
def _neighbour_pass(x, r, code, p, thresh, order, keys_sorted, strides, cells, offsets,
                    indptr, indices, fill):
    n, d = x.shape
    noff = offsets.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    nbkey = np.empty(noff, dtype=np.int64)
    for a in range(n):
        i = order[a]
        # neighbour cell keys, skipping those outside the grid
        nk = 0
        for o in range(noff):
            key = 0
            ok = True
            for k in range(d):
                c = cells[i, k] + offsets[o, k]
                if c < 0 or c >= strides[k, 1]:
                    ok = False
                    break
                key += c * strides[k, 0]
            if ok:
                nbkey[nk] = key
                nk += 1
        for o in range(nk):
            key = nbkey[o]
            lo = np.searchsorted(keys_sorted, key, side="left")
            hi = np.searchsorted(keys_sorted, key, side="right")
            for b in range(lo, hi):
                j = order[b]
                if j == i:
                    continue
                if _within(x, i, j, code, p, thresh):
                    if fill:
                        indices[indptr[i] + counts[i]] = j
                    counts[i] += 1
    return counts


def build_graph(cloud: PointCloud, r: float, norm: NormSpec) -> GeometricGraph:
    """Closed-ball geometric graph via a uniform grid of cell side r."""
    if not r > 0:
        raise ValueError("r must be positive")
    x = cloud.points
    n, d = x.shape
    if d != norm.d:
        raise ValueError("cloud dimension does not match the norm")
    if n == 0:
        return GeometricGraph(cloud, r, norm, np.zeros(1, np.int64), np.zeros(0, np.int32))
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    side = float(r)
    # coarsen the grid until linear keys fit comfortably in int64
    while True:
        dims = np.floor(span / side).astype(np.int64) + 1
        if float(np.prod(dims.astype(float))) < 2.0 ** 62:
            break
        side *= 2.0
    cells = np.minimum(np.floor((x - lo) / side).astype(np.int64), dims - 1)
    strides = np.empty((d, 2), dtype=np.int64)
    acc = 1
    for k in range(d - 1, -1, -1):
        strides[k, 0] = acc
        strides[k, 1] = dims[k]
        acc *= int(dims[k])
    keys = cells @ strides[:, 0]
    order = np.argsort(keys, kind="stable")
    keys_sorted = keys[order]
    offsets = np.array(np.meshgrid(*([[-1, 0, 1]] * d), indexing="ij")).reshape(d, -1).T.copy()
    code, p = _norm_code(norm)
    thresh = r * r if code == 2 else (r ** p if code == 3 else r)
    dummy = np.zeros(1, np.int64)
    dummy32 = np.zeros(1, np.int32)
    counts = _neighbour_pass(x, r, code, p, thresh, order, keys_sorted, strides, cells,
                             offsets, dummy, dummy32, False)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int32)
    _neighbour_pass(x, r, code, p, thresh, order, keys_sorted, strides, cells,
                    offsets, indptr, indices, True)
    _sort_rows(indptr, indices)
    return GeometricGraph(cloud, r, norm, indptr, indices)


@njit(cache=True)
def _sort_rows(indptr, indices):
    for i in range(indptr.shape[0] - 1):
        indices[indptr[i]:indptr[i + 1]].sort()


def all_pairs_graph(cloud: PointCloud, r: float, norm: NormSpec) -> Graph:
    """Quadratic reference construction used to cross-check build_graph."""
    x = cloud.points
    n = x.shape[0]
    diff = np.abs(x[:, None, :] - x[None, :, :])
    if norm.is_max_norm:
        adj = diff.max(axis=2) <= r
    elif norm.p == 2.0:
        adj = (diff * diff).sum(axis=2) <= r * r
    elif norm.p == 1.0:
        adj = diff.sum(axis=2) <= r
    else:
        adj = (diff ** norm.p).sum(axis=2) <= r ** norm.p
    np.fill_diagonal(adj, False)
    i, j = np.nonzero(np.triu(adj))
    return Graph.from_edges(n, np.stack([i, j], axis=1))


# ------------------------------------------------------------------ file I/O

def write_points(path, cloud: PointCloud) -> None:
    with open(path, "w") as fh:
        fh.write(f"{cloud.d} {cloud.n} {cloud.seed} {cloud.sigma!r}\n")
        for row in cloud.points:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_points(path) -> PointCloud:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError("point file header must be 'd n seed sigma'")
        d, n, seed = int(header[0]), int(header[1]), int(header[2])
        sigma = float(header[3])
        pts = np.loadtxt(fh, dtype=float, ndmin=2) if n else np.zeros((0, d))
    if pts.shape != (n, d):
        raise ValueError(f"expected {n} rows of {d} coordinates, got shape {pts.shape}")
    return PointCloud(pts, seed, None, sigma)
