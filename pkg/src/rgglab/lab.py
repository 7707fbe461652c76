"""Seeded parameter sweeps comparing sampled graphs with the limit curves.

Config files are plain ``key = value`` lines; ``#`` starts a comment and
lists are comma separated.  Keys:

    dim        dimension d (default 2)
    norm       p of the l_p norm, or ``inf`` (default 2)
    density    ``uniform`` or ``half-cube`` (default uniform)
    n          list of point counts
    t          list of t = sigma n r^d / ln n values        } exactly one
    r          list of explicit radii                       } of these
    nrd_power  list of exponents a with n r^d = n^a         } three keys
    trials     trials per (n, t) cell (default 1)
    seed       master seed (default 0)
    exact_cap  largest component handed to the exact chromatic search (default 60)
    chif_cap   largest graph handed to the fractional LP (default 60)
    output     CSV path (default sweep.csv)

Trial seeds are ``splitmix64(master, [(i_n << 40) | (i_t << 20) | trial])``
masked to 63 bits, where i_n and i_t index the n and t lists.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

from .geometry import NormSpec, PackingDensityUnavailable
from .graphkit.clique import clique_number
from .graphkit.colouring import ExactUnavailable, chromatic_bounds, chromatic_number_exact
from .graphkit.fractional import fractional_chromatic
from .limits import FeasibleCatalog, classify_regime, f_chromatic_bounds, f_clique
from .rgg import DensityModel, build_graph, radius_for_t, sample_points
from .rng import splitmix64

HEADER = ["n", "r", "t", "regime", "seed", "omega", "chi_lb", "chi_ub", "chi_exact", "chi_f",
          "scan_phi0", "pred_fcli", "pred_fcol_lo", "pred_fcol_hi", "ratio_chi_omega"]

_SCALE_KEYS = ("t", "r", "nrd_power")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    dim: int = 2
    norm_p: float = 2.0
    density: str = "uniform"
    n_values: tuple = ()
    scale_kind: str = "t"  # t | r | nrd_power
    scale_values: tuple = ()
    trials: int = 1
    seed: int = 0
    exact_cap: int = 60
    chif_cap: int = 60
    output: str = "sweep.csv"

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.trials >= 1 << 20 or len(self.scale_values) >= 1 << 20:
            raise ConfigError("trial and t-list indices must stay below 2^20")
        if not self.n_values or not self.scale_values:
            raise ConfigError("need at least one n and one scale value")
        if self.scale_kind not in _SCALE_KEYS:
            raise ConfigError(f"unknown scale kind {self.scale_kind!r}")
        if self.density not in ("uniform", "half-cube"):
            raise ConfigError("density must be 'uniform' or 'half-cube'")
        if any(n < 3 for n in self.n_values):
            raise ConfigError("every n must be at least 3")

    @property
    def norm(self) -> NormSpec:
        return NormSpec(self.norm_p, self.dim)

    @property
    def model(self) -> DensityModel:
        if self.density == "uniform":
            return DensityModel.uniform(self.dim)
        return DensityModel.half_cube(self.dim)

    def radius(self, n: int, value: float) -> float:
        sigma = self.model.sigma
        if self.scale_kind == "t":
            return radius_for_t(n, value, sigma, self.dim)
        if self.scale_kind == "r":
            return float(value)
        return (n ** value / n) ** (1.0 / self.dim)

    @classmethod
    def from_text(cls, text: str) -> "SweepConfig":
        raw: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key in raw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = value
        known = {"dim", "norm", "density", "n", "trials", "seed", "exact_cap", "chif_cap",
                 "output", *_SCALE_KEYS}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
        scale = [k for k in _SCALE_KEYS if k in raw]
        if len(scale) != 1:
            raise ConfigError("give exactly one of t, r, nrd_power")

        def floats(s):
            return tuple(float(v) for v in s.split(",") if v.strip())

        try:
            return cls(
                dim=int(raw.get("dim", 2)),
                norm_p=math.inf if raw.get("norm", "2") == "inf" else float(raw.get("norm", 2)),
                density=raw.get("density", "uniform"),
                n_values=tuple(int(float(v)) for v in raw.get("n", "").split(",") if v.strip()),
                scale_kind=scale[0],
                scale_values=floats(raw[scale[0]]),
                trials=int(raw.get("trials", 1)),
                seed=int(raw.get("seed", 0)),
                exact_cap=int(raw.get("exact_cap", 60)),
                chif_cap=int(raw.get("chif_cap", 60)),
                output=raw.get("output", "sweep.csv"),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())


def trial_seed(master: int, i_n: int, i_t: int, trial: int) -> int:
    counter = (i_n << 40) | (i_t << 20) | trial
    return int(splitmix64(master, [counter])[0]) & ((1 << 63) - 1)


@dataclass(frozen=True)
class SweepRecord:
    n: int
    r: float
    t: float
    regime: str
    seed: int
    omega: int
    chi_lb: int
    chi_ub: int
    chi_exact: int | None
    chi_f: float | None
    scan_phi0: float
    pred_fcli: float
    pred_fcol_lo: float | None
    pred_fcol_hi: float | None
    max_degree: int = field(default=0, compare=False)
    sigma: float = field(default=1.0, compare=False)
    d: int = field(default=2, compare=False)

    def __post_init__(self):
        if not sandwich_holds(self):
            raise AssertionError(f"sandwich violated in record {self}")

    @property
    def ratio_chi_omega(self) -> float:
        return self.chi_ub / self.omega

    @property
    def omega_scaled(self) -> float:
        """omega / (sigma n r^d)."""
        return self.omega / (self.sigma * self.n * self.r ** self.d)

    def row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)
        return [fmt(v) for v in (self.n, self.r, self.t, self.regime, self.seed, self.omega,
                                 self.chi_lb, self.chi_ub, self.chi_exact, self.chi_f,
                                 self.scan_phi0, self.pred_fcli, self.pred_fcol_lo,
                                 self.pred_fcol_hi, self.ratio_chi_omega)]


def sandwich_holds(rec: SweepRecord, tol: float = 1e-6) -> bool:
    """omega <= ceil(chi_f - tol) <= chi_exact <= chi_ub <= max degree + 1.

    Also checks omega <= chi_lb <= chi_exact and scan_phi0 <= chi_f + tol.
    """
    exact_or_ub = rec.chi_exact if rec.chi_exact is not None else rec.chi_ub
    ok = rec.omega <= rec.chi_lb <= exact_or_ub <= rec.chi_ub <= rec.max_degree + 1
    if rec.chi_f is not None:
        f = math.ceil(rec.chi_f - tol)
        ok = ok and rec.omega <= f <= exact_or_ub and rec.scan_phi0 <= rec.chi_f + tol
    return ok


def predictions(t: float, norm: NormSpec, catalog: FeasibleCatalog | None = None):
    """(f_clique, f_chi lower, f_chi upper); the chromatic pair is None without a packing density."""
    fc = f_clique(t, norm)
    try:
        lo, hi = f_chromatic_bounds(t, norm, catalog)
    except PackingDensityUnavailable:
        lo = hi = None
    return fc, lo, hi


def run_trial(config: SweepConfig, n: int, r: float, seed: int, preds) -> SweepRecord:
    norm = config.norm
    cloud = sample_points(config.model, n, seed)
    g = build_graph(cloud, r, norm)
    omega, _ = clique_number(g)
    bounds = chromatic_bounds(g)
    chi_lb = max(omega, bounds.lower)
    chi_ub = bounds.upper
    chi_exact = None
    try:
        chi_exact, _ = chromatic_number_exact(g, max_component=config.exact_cap)
    except ExactUnavailable:
        pass
    chi_f = None
    if n <= config.chif_cap:
        chi_f = fractional_chromatic(g).objective
    sigma = cloud.sigma
    t = sigma * n * r ** config.dim / math.log(n)
    regime = classify_regime(n, r, config.dim, sigma)
    fc, lo, hi = preds
    return SweepRecord(n, r, t, str(regime), seed, omega, chi_lb, chi_ub, chi_exact, chi_f,
                       bounds.dual_value, fc, lo, hi, g.max_degree(), sigma, config.dim)


def run_sweep(config: SweepConfig, write: bool = True) -> list[SweepRecord]:
    """One record per (n, t, trial), sorted in that order, optionally written as CSV."""
    norm = config.norm
    catalog = FeasibleCatalog.default(norm)
    sigma = config.model.sigma
    records = []
    for i_n, n in enumerate(config.n_values):
        for i_t, value in enumerate(config.scale_values):
            r = config.radius(n, value)
            t = sigma * n * r ** config.dim / math.log(n)
            preds = predictions(t, norm, catalog)
            for trial in range(config.trials):
                seed = trial_seed(config.seed, i_n, i_t, trial)
                records.append(((i_n, i_t, trial), run_trial(config, n, r, seed, preds)))
    records.sort(key=lambda kr: kr[0])
    out = [rec for _, rec in records]
    if write:
        write_csv(config.output, out)
    return out


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for rec in records:
        w.writerow(rec.row())
    return buf.getvalue()


def write_csv(path, records) -> None:
    text = records_to_csv(records)
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
