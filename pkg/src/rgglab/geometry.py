"""Norms, unit-ball volumes, packing densities and separated-set counting bounds.

Only the p-norm family is supported.  ``p`` may be any real number >= 1 or
``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PackingDensityUnavailable(LookupError):
    """Raised when no rigorously known packing density exists for a norm."""


@dataclass(frozen=True)
class NormSpec:
    p: float = 2.0
    d: int = 2

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError(f"p-norm parameter must be >= 1, got {self.p}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "d", int(self.d))

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    @property
    def is_max_norm(self) -> bool:
        return math.isinf(self.p)

    def label(self) -> str:
        return "inf" if self.is_max_norm else f"{self.p:g}"


def norm_eval(norm: NormSpec, v) -> float:
    v = np.asarray(v, dtype=float)
    if v.shape != (norm.d,):
        raise ValueError(f"expected a vector of length {norm.d}, got shape {v.shape}")
    return float(pairwise_norms(norm, v[None, :])[0])


def pairwise_norms(norm: NormSpec, diffs: np.ndarray) -> np.ndarray:
    """Row-wise norms of an ``(m, d)`` array of difference vectors."""
    diffs = np.asarray(diffs, dtype=float)
    if norm.is_max_norm:
        return np.abs(diffs).max(axis=-1)
    if norm.p == 1.0:
        return np.abs(diffs).sum(axis=-1)
    # scale by the largest coordinate so tiny vectors do not underflow to zero
    a = np.abs(diffs)
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return m[..., 0] * ((a / safe) ** norm.p).sum(axis=-1) ** (1.0 / norm.p)


def unit_ball_volume(norm: NormSpec) -> float:
    d = norm.d
    if norm.is_max_norm:
        return 2.0 ** d
    if norm.p == 2.0 and d == 2:
        return math.pi
    p = norm.p
    log_vol = d * (math.log(2.0) + math.lgamma(1.0 / p + 1.0)) - math.lgamma(d / p + 1.0)
    return math.exp(log_vol)


def half_ball_volume(norm: NormSpec) -> float:
    """Volume of the ball of radius 1/2, i.e. vol(B) / 2^d."""
    return unit_ball_volume(norm) / 2.0 ** norm.d


def unit_cube_diameter(norm: NormSpec) -> float:
    """Norm diameter of [0, 1]^d, which is the norm of the all-ones vector."""
    if norm.is_max_norm:
        return 1.0
    return norm.d ** (1.0 / norm.p)


@dataclass(frozen=True)
class PackingInfo:
    delta: float
    source: str  # "exact-known" | "user-supplied" | "volume-upper-bound"

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"packing density must lie in (0, 1], got {self.delta}")
        if self.source not in ("exact-known", "user-supplied", "volume-upper-bound"):
            raise ValueError(f"unknown packing density source {self.source!r}")


def _known_delta(norm: NormSpec) -> float | None:
    if norm.d == 1:
        # every norm on the line is a multiple of |x|; intervals tile
        return 1.0
    if norm.is_max_norm:
        return 1.0
    if norm.p == 1.0 and norm.d == 2:
        # the l1 disc is a square rotated by 45 degrees
        return 1.0
    if norm.p == 2.0:
        if norm.d == 2:
            return math.pi / (2.0 * math.sqrt(3.0))
        if norm.d == 3:
            return math.pi / math.sqrt(18.0)
    return None


def packing_density(norm: NormSpec, delta: float | None = None,
                    allow_bound: bool = False) -> PackingInfo:
    """Look up the translational packing density of the unit ball.

    A user-supplied ``delta`` takes precedence.  With ``allow_bound`` an
    unknown norm yields the trivial bound delta <= 1 tagged
    ``"volume-upper-bound"``; it is not an admissible input for upper bounds
    on the chromatic limit.
    """
    if delta is not None:
        return PackingInfo(float(delta), "user-supplied")
    known = _known_delta(norm)
    if known is not None:
        return PackingInfo(known, "exact-known")
    if allow_bound:
        return PackingInfo(1.0, "volume-upper-bound")
    raise PackingDensityUnavailable(
        f"packing density unavailable for p={norm.label()}, d={norm.d}; supply it explicitly")


def separated_count_upper(norm: NormSpec, K: float) -> int:
    """Upper bound on the size of a set in (0, K)^d with pairwise distances > 1.

    Minimum of a volume bound (the radius-1/2 balls around the points are
    disjoint and sit inside (-1/2, K + 1/2)^d) and a covering bound (a grid of
    m^d cells of diameter < 1 holds at most one point per cell).
    """
    if K <= 0:
        raise ValueError("K must be positive")
    d = norm.d
    volume_bound = math.floor((K + 1.0) ** d * 2.0 ** d / unit_ball_volume(norm))
    m = math.floor(K * unit_cube_diameter(norm)) + 1
    covering_bound = m ** d
    return max(1, min(volume_bound, covering_bound))
