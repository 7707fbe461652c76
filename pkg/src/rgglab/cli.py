"""Command-line entry point: ``rgglab {limits,sample,scan,graph,sweep}``.

Exit status is 0 on success, 1 on a runtime failure and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .geometry import NormSpec, PackingDensityUnavailable


class UsageError(Exception):
    pass


def _norm_arg(text: str) -> float:
    if text.strip().lower() in ("inf", "max"):
        return math.inf
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a norm: {text!r}") from None
    if p < 1:
        raise argparse.ArgumentTypeError("norm parameter must be >= 1 or 'inf'")
    return p


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _table(header, rows, out) -> None:
    cells = [[str(h) for h in header]] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    for r in cells:
        out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")


# ------------------------------------------------------------- subcommands

def cmd_limits(args, out) -> int:
    from .limits import (FeasibleCatalog, H, bracket_t0, f_chromatic_bounds, f_clique,
                         f_ratio_bounds, mu_beta, solve_c)
    norm = NormSpec(args.norm, args.dim)
    catalog = FeasibleCatalog.default(norm)
    if args.x:
        _table(["x", "H(x)"], [(x, H(x)) for x in args.x], out)
        out.write("\n")
    if args.w:
        _table(["w", "t", "c(w,t)"], [(w, t, solve_c(w, t)) for w in args.w for t in args.t], out)
        out.write("\n")
    rows = []
    for t in args.t:
        fc = f_clique(t, norm)
        try:
            lo, hi = f_chromatic_bounds(t, norm, catalog, args.delta)
            rlo, rhi = f_ratio_bounds(t, norm, catalog, args.delta)
        except PackingDensityUnavailable:
            lo = hi = rlo = rhi = None
        rows.append((t, fc, lo, hi, rlo, rhi))
    _table(["t", "f_omega", "f_chi_lo", "f_chi_hi", "f_rat_lo", "f_rat_hi"], rows, out)
    if args.beta:
        out.write("\n")
        _table(["beta", "t", "mu"], [(b, t, mu_beta(b, t, norm)) for b in args.beta
                                     for t in args.t], out)
    if args.bracket:
        out.write("\n" + bracket_t0(norm, catalog, delta=args.delta).describe() + "\n")
    return 0


def cmd_sample(args, out) -> int:
    from .graphkit.io import write_edges
    from .rgg import DensityModel, build_graph, radius_for_t, sample_points, write_points
    model = DensityModel.uniform(args.dim) if args.density == "uniform" else DensityModel.half_cube(args.dim)
    cloud = sample_points(model, args.n, args.seed)
    write_points(args.out, cloud)
    out.write(f"wrote {cloud.n} points to {args.out}\n")
    if args.edges:
        if args.r is None and args.t is None:
            raise UsageError("--edges needs --r or --t")
        r = args.r if args.r is not None else radius_for_t(args.n, args.t, model.sigma, args.dim)
        g = build_graph(cloud, r, NormSpec(args.norm, args.dim))
        write_edges(args.edges, g)
        out.write(f"wrote {g.num_edges} edges (r = {r!r}) to {args.edges}\n")
    return 0


def cmd_scan(args, out) -> int:
    from .limits import phi_beta
    from .rgg import read_points
    from .scan import scan_ball, scan_radial
    if args.beta is None and args.rho is None:
        raise UsageError("give --rho, or --beta with --r")
    if args.beta is not None and args.r is None:
        raise UsageError("--beta needs --r")
    cloud = read_points(args.cloud)
    norm = NormSpec(args.norm, cloud.d)
    if args.beta is None:
        res = scan_ball(cloud.points, args.rho, norm)
    else:
        res = scan_radial(cloud.points, phi_beta(args.beta, norm), args.r)
    out.write(f"value  {res.value:.12g}\n")
    out.write("center " + " ".join(f"{c:.12g}" for c in res.center) + "\n")
    out.write(f"exact  {res.exact}\n")
    out.write(f"gap    {res.gap:.6g}\n")
    return 0


def cmd_graph(args, out) -> int:
    from .graphkit.clique import clique_number
    from .graphkit.colouring import ExactUnavailable, chromatic_bounds, chromatic_number_exact
    from .graphkit.fractional import fractional_chromatic
    from .graphkit.io import read_edges
    from .rgg import build_graph, read_points
    if (args.cloud is None) == (args.edges is None):
        raise UsageError("give exactly one of --cloud or --edges")
    if args.grid_lp is not None and args.cloud is None:
        raise UsageError("--grid-lp needs --cloud")
    if args.cloud is not None:
        if args.r is None:
            raise UsageError("--cloud needs --r")
        cloud = read_points(args.cloud)
        norm = NormSpec(args.norm, cloud.d)
        g = build_graph(cloud, args.r, norm)
    else:
        g = read_edges(args.edges)
    omega, _ = clique_number(g)
    bounds = chromatic_bounds(g)
    try:
        chi, _ = chromatic_number_exact(g, max_component=args.exact_cap)
    except ExactUnavailable:
        chi = None
    chi_f = fractional_chromatic(g).objective if g.n <= args.chif_cap else None
    rows = [("n", g.n), ("edges", g.num_edges), ("max_degree", g.max_degree()),
            ("omega", omega), ("chi_lower", max(omega, bounds.lower)),
            ("chi_upper", bounds.upper), ("chi", chi), ("chi_f", chi_f)]
    if args.grid_lp is not None:
        from .graphkit.gridlp import grid_lp_colouring
        eps, K = args.grid_lp
        res = grid_lp_colouring(cloud.points, args.r, norm, eps, int(K))
        if not g.is_proper_colouring(res.colouring.colours):
            raise RuntimeError("grid-LP colouring is not proper")
        rows += [("grid_lp_palette", res.colouring.palette), ("grid_lp_guarantee", res.guarantee)]
    for k, v in rows:
        out.write(f"{k:<18}{_fmt(v)}\n")
    return 0


def cmd_sweep(args, out) -> int:
    from dataclasses import replace

    from .lab import SweepConfig, run_sweep
    cfg = SweepConfig.from_file(args.config)
    if args.out:
        cfg = replace(cfg, output=args.out)
    records = run_sweep(cfg)
    out.write(f"wrote {len(records)} records to {cfg.output}\n")
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rgglab",
                                 description="Clique and chromatic numbers of random geometric graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limits", help="tabulate the limit curves")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--norm", type=_norm_arg, default=2.0, help="p of the l_p norm or 'inf'")
    p.add_argument("--t", type=_float_list, required=True, help="comma-separated t values")
    p.add_argument("--beta", type=_float_list, help="also tabulate mu(beta, t)")
    p.add_argument("--x", type=_float_list, help="also tabulate H(x)")
    p.add_argument("--w", type=_float_list, help="also tabulate c(w, t)")
    p.add_argument("--delta", type=float, help="packing density to use")
    p.add_argument("--bracket", action="store_true", help="bracket the threshold t0")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("sample", help="sample a point cloud (and optionally its graph)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", choices=["uniform", "half-cube"], default="uniform")
    p.add_argument("--out", required=True, help="point cloud file")
    p.add_argument("--edges", help="also write the edge list here")
    p.add_argument("--r", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--norm", type=_norm_arg, default=2.0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("scan", help="scan statistics of a point cloud file")
    p.add_argument("--cloud", required=True)
    p.add_argument("--norm", type=_norm_arg, default=2.0)
    p.add_argument("--rho", type=float, help="ball radius")
    p.add_argument("--beta", type=float, help="scan with the two-level function of this beta")
    p.add_argument("--r", type=float, help="graph radius for --beta")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("graph", help="clique and chromatic numbers of a cloud or edge list")
    p.add_argument("--cloud")
    p.add_argument("--edges")
    p.add_argument("--r", type=float)
    p.add_argument("--norm", type=_norm_arg, default=2.0)
    p.add_argument("--exact-cap", type=int, default=60)
    p.add_argument("--chif-cap", type=int, default=60)
    p.add_argument("--grid-lp", type=float, nargs=2, metavar=("EPS", "K"),
                   help="also run the grid-LP colouring")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("sweep", help="run a sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config's output path")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"rgglab {args.command}: {exc}\n")
        return 2
    except Exception as exc:
        sys.stderr.write(f"rgglab {args.command}: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
