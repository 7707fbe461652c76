"""Analytic limit functions for clique and chromatic numbers of geometric graphs.

The central objects are simple functions described by a :class:`FunctionProfile`
(pairs of level value and level volume), the weighting value ``s(phi, t)`` and
the weighted integral ``xi(phi, t) = sum a_i exp(s a_i) v_i``.  ``t = math.inf``
is handled as its own case, where ``xi`` reduces to the plain integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import (NormSpec, PackingDensityUnavailable, half_ball_volume,
                       packing_density, separated_count_upper, unit_ball_volume)

INF = math.inf

_BISECT_RTOL = 1e-13
_MAX_ITER = 400


class NumericalFailure(RuntimeError):
    pass


class ThresholdUndefined(ValueError):
    pass


# ---------------------------------------------------------------- H and friends

def _h_near_one(eps: float) -> float:
    # H(1 + eps) = sum_{k>=2} (-1)^k eps^k / (k (k - 1))
    total = 0.0
    power = eps
    for k in range(2, 30):
        power *= eps
        total += (power if k % 2 == 0 else -power) / (k * (k - 1))
        if abs(power) < 1e-18 * abs(total):
            break
    return total


def H(x: float) -> float:
    """x ln x - x + 1 for x > 0."""
    if not x > 0:
        raise ValueError(f"H is defined for x > 0, got {x}")
    if math.isinf(x):
        return math.inf
    eps = x - 1.0
    if abs(eps) < 0.05:
        return _h_near_one(eps)
    return x * math.log(x) - x + 1.0


def _h_exp(y: float) -> float:
    """H(e^y) = e^y (y - 1) + 1, accurate for small y >= 0."""
    if y < 0.1:
        # sum_{k>=2} (k - 1) y^k / k!
        total = 0.0
        term = y  # y^k / k! at k = 1
        for k in range(2, 25):
            term *= y / k
            total += (k - 1) * term
            if term < 1e-18 * total:
                break
        return total
    if y > 700.0:
        return math.inf
    return math.exp(y) * (y - 1.0) + 1.0


def _check_t(t: float) -> None:
    if not t > 0:
        raise ValueError(f"t must be positive (or math.inf), got {t}")


def solve_c(w: float, t: float) -> float:
    """The unique x >= w with H(x / w) = 1 / (w t); equals w when t is infinite."""
    if not w > 0:
        raise ValueError(f"w must be positive, got {w}")
    _check_t(t)
    if math.isinf(t):
        return float(w)
    target = 1.0 / (w * t)
    lo, hi = 1.0, 2.0
    it = 0
    while H(hi) < target:
        lo, hi = hi, hi * 2.0
        it += 1
        if it > _MAX_ITER:
            raise NumericalFailure("solve_c: could not bracket the root")
    it = 0
    while hi - lo > _BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if H(mid) < target:
            lo = mid
        else:
            hi = mid
        it += 1
        if it > _MAX_ITER:
            raise NumericalFailure("solve_c: bisection did not converge")
    y = 0.5 * (lo + hi)
    for _ in range(3):
        slope = math.log(y)
        if slope <= 0:
            break
        step = y - (H(y) - target) / slope
        if lo <= step <= hi:
            y = step
    return w * y


# ------------------------------------------------------------------- profiles

@dataclass(frozen=True)
class FunctionProfile:
    """A nonnegative simple function given by (value, volume) level pairs."""

    levels: tuple

    def __init__(self, levels: Iterable[Sequence[float]]):
        pairs = tuple((float(a), float(v)) for a, v in levels)
        if not pairs:
            raise ValueError("profile needs at least one level")
        for a, v in pairs:
            if not (a > 0 and math.isfinite(a)):
                raise ValueError(f"level values must be positive and finite, got {a}")
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"level volumes must be positive and finite, got {v}")
        values = [a for a, _ in pairs]
        if len(set(values)) != len(values):
            raise ValueError("level values must be distinct")
        object.__setattr__(self, "levels", pairs)

    @classmethod
    def merged(cls, levels: Iterable[Sequence[float]]) -> "FunctionProfile":
        """Build a profile, pooling the volumes of levels that share a value."""
        acc: dict[float, float] = {}
        for a, v in levels:
            acc[float(a)] = acc.get(float(a), 0.0) + float(v)
        return cls(sorted(acc.items(), reverse=True))

    @classmethod
    def indicator(cls, volume: float) -> "FunctionProfile":
        return cls([(1.0, volume)])

    @property
    def values(self) -> np.ndarray:
        return np.array([a for a, _ in self.levels])

    @property
    def volumes(self) -> np.ndarray:
        return np.array([v for _, v in self.levels])

    def integral(self) -> float:
        return math.fsum(a * v for a, v in self.levels)

    def max_value(self) -> float:
        return max(a for a, _ in self.levels)

    def scaled(self, lam: float) -> "FunctionProfile":
        """The profile of lam * phi."""
        if not lam > 0:
            raise ValueError("scale factor must be positive")
        return FunctionProfile([(lam * a, v) for a, v in self.levels])

    def volume_scaled(self, factor: float) -> "FunctionProfile":
        """Every level set stretched so its volume is multiplied by ``factor``."""
        if not factor > 0:
            raise ValueError("volume factor must be positive")
        return FunctionProfile([(a, factor * v) for a, v in self.levels])

    def concat(self, other: "FunctionProfile") -> "FunctionProfile":
        """phi + psi for functions with disjoint supports."""
        return FunctionProfile.merged(self.levels + other.levels)


def _level_sum(levels, s: float) -> float:
    return math.fsum(v * _h_exp(s * a) for a, v in levels)


def _level_slope(levels, s: float) -> float:
    total = 0.0
    for a, v in levels:
        y = s * a
        total += v * a * y * math.exp(y)
    return total


def weighting_value(phi: FunctionProfile, t: float) -> float:
    """The s >= 0 solving sum_i v_i H(exp(s a_i)) = 1/t (zero when t is infinite)."""
    if not isinstance(phi, FunctionProfile):
        raise TypeError("weighting_value expects a FunctionProfile")
    _check_t(t)
    if math.isinf(t):
        return 0.0
    target = 1.0 / t
    levels = phi.levels
    lo, hi = 0.0, 1.0 / phi.max_value()
    it = 0
    while _level_sum(levels, hi) < target:
        lo, hi = hi, hi * 2.0
        it += 1
        if it > _MAX_ITER:
            raise NumericalFailure("weighting_value: could not bracket the root")
    it = 0
    while hi - lo > _BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if _level_sum(levels, mid) < target:
            lo = mid
        else:
            hi = mid
        it += 1
        if it > _MAX_ITER:
            raise NumericalFailure("weighting_value: bisection did not converge")
    s = 0.5 * (lo + hi)
    for _ in range(3):
        slope = _level_slope(levels, s)
        if slope <= 0:
            break
        step = s - (_level_sum(levels, s) - target) / slope
        if lo <= step <= hi:
            s = step
    return s


def xi(phi: FunctionProfile, t: float) -> float:
    """Weighted integral sum_i a_i exp(s a_i) v_i with s = weighting_value(phi, t)."""
    if math.isinf(t):
        return phi.integral()
    s = weighting_value(phi, t)
    return math.fsum(a * math.exp(s * a) * v for a, v in phi.levels)


# ------------------------------------------------------- geometric functions

@dataclass(frozen=True)
class RadialLevels:
    """Radial step function: value a_i for rho_{i-1} < |x| <= rho_i.

    ``rings`` holds (outer radius, value) pairs with radii strictly increasing
    and values strictly decreasing.
    """

    norm: NormSpec
    rings: tuple

    def __init__(self, norm: NormSpec, rings: Iterable[Sequence[float]]):
        pairs = tuple((float(r), float(a)) for r, a in rings)
        if not pairs:
            raise ValueError("need at least one ring")
        prev_r, prev_a = 0.0, math.inf
        for r, a in pairs:
            if not r > prev_r:
                raise ValueError("ring radii must be positive and strictly increasing")
            if not (0 < a < prev_a):
                raise ValueError("ring values must be positive and strictly decreasing")
            prev_r, prev_a = r, a
        object.__setattr__(self, "norm", norm)
        object.__setattr__(self, "rings", pairs)

    @property
    def radii(self) -> np.ndarray:
        return np.array([r for r, _ in self.rings])

    @property
    def values(self) -> np.ndarray:
        return np.array([a for _, a in self.rings])

    @property
    def outer_radius(self) -> float:
        return self.rings[-1][0]

    def nested_weights(self) -> np.ndarray:
        """Weights b_i with phi = sum_i b_i * 1{|x| <= rho_i}."""
        a = self.values
        return a - np.append(a[1:], 0.0)

    def value_at(self, dist) -> np.ndarray:
        dist = np.asarray(dist, dtype=float)
        out = np.zeros_like(dist)
        for r, a in reversed(self.rings):
            out = np.where(dist <= r, a, out)
        return out

    def to_profile(self) -> FunctionProfile:
        vol = unit_ball_volume(self.norm)
        d = self.norm.d
        levels = []
        prev = 0.0
        for r, a in self.rings:
            levels.append((a, vol * (r ** d - prev ** d)))
            prev = r
        return FunctionProfile(levels)


def phi_zero(norm: NormSpec) -> RadialLevels:
    """Indicator of the closed ball of radius 1/2."""
    return RadialLevels(norm, [(0.5, 1.0)])


def phi_beta(beta: float, norm: NormSpec) -> RadialLevels:
    """1 on the ball of radius (1-beta)/2, 1/2 out to radius (1+beta)/2."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    inner, outer = (1.0 - beta) / 2.0, (1.0 + beta) / 2.0
    rings = []
    if inner > 0:
        rings.append((inner, 1.0))
    if outer > inner:
        rings.append((outer, 0.5))
    return RadialLevels(norm, rings)


@dataclass(frozen=True)
class CubeFunction:
    """Constant 1/N on the open cube (0, K)^d, N bounding any 1-separated set there."""

    norm: NormSpec
    side: float
    count_bound: int

    @classmethod
    def sound(cls, norm: NormSpec, side: float) -> "CubeFunction":
        return cls(norm, float(side), separated_count_upper(norm, side))

    def to_profile(self) -> FunctionProfile:
        return FunctionProfile([(1.0 / self.count_bound, self.side ** self.norm.d)])


def certified_beta_max(norm: NormSpec) -> float:
    """Largest beta for which the two-level function is provably feasible.

    On the line any beta works: two points more than 1 apart inside an
    interval of length <= 2 leave no room for the inner plateau.  For the
    Euclidean norm three points with pairwise distances > 1 need an enclosing
    ball of radius > 1/sqrt(3), so the outer radius (1+beta)/2 must stay at or
    below that.  Other norms in d >= 2 are only certified at beta = 0.
    """
    if norm.d == 1:
        return 1.0
    if norm.is_euclidean:
        return 2.0 / math.sqrt(3.0) - 1.0
    return 0.0


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    function: object  # RadialLevels or CubeFunction
    certificate: str

    def profile(self) -> FunctionProfile:
        return self.function.to_profile()


@dataclass(frozen=True)
class FeasibleCatalog:
    norm: NormSpec
    entries: tuple = field(default_factory=tuple)

    @classmethod
    def default(cls, norm: NormSpec, n_beta: int = 64,
                cube_sides: Sequence[float] = (1, 2, 4, 8)) -> "FeasibleCatalog":
        entries = [CatalogEntry("phi0", phi_zero(norm), "diameter-1 ball holds one separated point")]
        bmax = certified_beta_max(norm)
        if bmax > 0:
            for beta in np.linspace(0.0, bmax, n_beta)[1:]:
                entries.append(CatalogEntry(
                    f"phi_beta[{beta:.6f}]", phi_beta(float(beta), norm),
                    "an inner point excludes all others; at most two separated points fit in the outer ball"))
        for K in cube_sides:
            entries.append(CatalogEntry(
                f"cube[{K:g}]", CubeFunction.sound(norm, K),
                "value 1/N with N a separated-count upper bound"))
        return cls(norm, tuple(entries))

    @classmethod
    def only_phi0(cls, norm: NormSpec) -> "FeasibleCatalog":
        return cls(norm, (CatalogEntry("phi0", phi_zero(norm), "diameter-1 ball holds one separated point"),))

    def with_entry(self, entry: CatalogEntry) -> "FeasibleCatalog":
        return FeasibleCatalog(self.norm, self.entries + (entry,))

    def best(self, t: float) -> tuple[float, CatalogEntry]:
        best_val, best_entry = -math.inf, None
        for e in self.entries:
            val = xi(e.profile(), t)
            if val > best_val:
                best_val, best_entry = val, e
        return best_val, best_entry


# ---------------------------------------------------------------- limit curves

def f_clique(t: float, norm: NormSpec) -> float:
    return solve_c(half_ball_volume(norm), t)


def _packing_floor(norm: NormSpec, delta: float | None) -> float:
    info = packing_density(norm, delta)
    if info.source == "volume-upper-bound":
        raise PackingDensityUnavailable("an exact or user-supplied packing density is required")
    return half_ball_volume(norm) / info.delta


def f_chromatic_bounds(t: float, norm: NormSpec, catalog: FeasibleCatalog | None = None,
                       delta: float | None = None,
                       use_packing_floor: bool = True) -> tuple[float, float]:
    """(lower, upper) bounds on the chromatic limit function at t.

    The lower bound is the best catalog entry, raised to vol(B)/(2^d delta)
    when ``use_packing_floor`` is set (that value bounds the limit from below
    for every t).  The upper bound is c(vol(B)/(2^d delta), t).
    """
    w = _packing_floor(norm, delta)
    if catalog is None:
        catalog = FeasibleCatalog.default(norm)
    lower, _ = catalog.best(t)
    lower = max(lower, f_clique(t, norm))
    if use_packing_floor:
        lower = max(lower, w)
    upper = solve_c(w, t)
    if lower > upper:
        # only possible through rounding when delta = 1
        lower = upper if lower - upper <= 1e-12 * upper else lower
    return lower, upper


def f_ratio_bounds(t: float, norm: NormSpec, catalog: FeasibleCatalog | None = None,
                   delta: float | None = None) -> tuple[float, float]:
    lower, upper = f_chromatic_bounds(t, norm, catalog, delta)
    fc = f_clique(t, norm)
    return lower / fc, upper / fc


def mu_beta(beta: float, t: float, norm: NormSpec) -> float:
    return xi(phi_beta(beta, norm).to_profile(), t)


@dataclass(frozen=True)
class ThresholdBracket:
    t_lo: float | None
    t_hi: float | None

    @property
    def separated(self) -> bool:
        return self.t_hi is not None

    def describe(self) -> str:
        if not self.separated:
            return "no separation found"
        lo = "none" if self.t_lo is None else f"{self.t_lo:.6g}"
        return f"t0 in [{lo}, {self.t_hi:.6g}]"


def bracket_t0(norm: NormSpec, catalog: FeasibleCatalog | None = None,
               grid: Sequence[float] | None = None, delta: float | None = None) -> ThresholdBracket:
    """Bracket the point where the catalog first beats the clique limit.

    Only the catalog is consulted (no packing floor), so the bracket reflects
    what the supplied feasible functions can certify.
    """
    info = packing_density(norm, delta)
    if info.delta >= 1.0:
        raise ThresholdUndefined("threshold undefined: packing density is 1, the ratio is identically 1")
    if catalog is None:
        catalog = FeasibleCatalog.default(norm)
    if grid is None:
        grid = np.logspace(-2, 4, 241)
    grid = sorted(float(g) for g in grid)
    t_hi = None
    for t in grid:
        fc = f_clique(t, norm)
        best, _ = catalog.best(t)
        if best - fc > 1e-6 * fc:
            t_hi = t
            break
    t_lo = None
    for t in grid:
        if t_hi is not None and t >= t_hi:
            break
        fc = f_clique(t, norm)
        best, _ = catalog.best(t)
        if abs(best - fc) <= 1e-9 * fc:
            t_lo = t
    return ThresholdBracket(t_lo, t_hi)


# --------------------------------------------------------------- regimes

def sparse_level(n: float, nrd: float) -> float:
    """ln n / ln(ln n / (n r^d)), the sparse-regime growth of both graph invariants."""
    ln_n = math.log(n)
    if not nrd > 0:
        raise ValueError("n r^d must be positive")
    if nrd >= ln_n:
        raise ValueError("sparse level requires n r^d < ln n")
    return ln_n / math.log(ln_n / nrd)


def very_sparse_level(n: float, r: float, d: int) -> int:
    """The k with n^(-1/(k-1/2)) <= n r^d < n^(-1/(k+1/2)); zero below n^(-2)."""
    nrd = n * r ** d
    if not nrd > 0:
        raise ValueError("n r^d must be positive")
    if nrd >= 1.0:
        raise ValueError("very sparse level requires n r^d < 1")
    e = -math.log(nrd) / math.log(n)
    if e > 2.0 + 1e-12:
        return 0
    return int(math.floor(1.0 / e + 0.5 + 1e-12))


def poisson_tail_bounds(mu: float, k: float) -> tuple[float, float, float]:
    """(Chernoff upper, elementary lower, elementary upper) for P(Po(mu) >= k)."""
    if not mu > 0:
        raise ValueError("mean must be positive")
    if k < mu:
        raise ValueError("upper-tail bounds need k >= mu")
    chernoff = math.exp(-mu * H(k / mu))
    lower = (mu / (math.e * k)) ** k
    upper = (math.e * mu / k) ** k
    return chernoff, lower, upper


@dataclass(frozen=True)
class RegimeLabel:
    kind: str  # VerySparse | Sparse | Intermediate | Dense
    t: float

    def __str__(self) -> str:
        if self.kind == "Intermediate":
            return f"Intermediate({self.t:.4g})"
        return self.kind


def classify_regime(n: int, r: float, d: int, sigma: float = 1.0) -> RegimeLabel:
    """Dense for t >= 100, Intermediate(t) for t >= 0.01, then VerySparse when
    n r^d <= n^-0.1, Sparse otherwise.  The t bands are checked first so every
    t in [0.01, 100] reads as Intermediate even at moderate n."""
    nrd = n * r ** d
    t = sigma * nrd / math.log(n)
    # a relative hair of slack so radius_for_t round trips land in the band
    if t >= 100.0 * (1 - 1e-12):
        return RegimeLabel("Dense", t)
    if t >= 0.01 * (1 - 1e-12):
        return RegimeLabel("Intermediate", t)
    if nrd <= n ** -0.1:
        return RegimeLabel("VerySparse", t)
    return RegimeLabel("Sparse", t)
