"""Covering linear programs: min c.x subject to A x >= b, x >= 0.

Two solvers share one starting point: the columns of ``A`` must include every
unit vector, and those columns form the first basis (feasible because b >= 0).

* :func:`solve_covering` is a revised simplex in floating point.  It prices
  with the most negative reduced cost and switches to Bland's rule when it
  stalls on degenerate pivots.
* :func:`solve_covering_exact` is a dense tableau over ``fractions.Fraction``
  with Bland's rule throughout, used as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    x: np.ndarray          # structural column values
    y: np.ndarray          # row duals
    objective: float
    basis: list            # basic column indices (structural < ncols <= surplus)


def _unit_columns(A: np.ndarray) -> list[int]:
    m = A.shape[0]
    cols = []
    for i in range(m):
        hit = np.nonzero((A[i] == 1) & (np.count_nonzero(A, axis=0) == 1))[0]
        if hit.size == 0:
            raise LPError(f"row {i} has no unit column to start the basis")
        cols.append(int(hit[0]))
    return cols


def solve_covering(A, b=None, c=None, tol: float = 1e-9, max_iter: int = 100_000) -> LPResult:
    A = np.asarray(A, dtype=float)
    m, ncols = A.shape
    b = np.ones(m) if b is None else np.asarray(b, dtype=float)
    c = np.ones(ncols) if c is None else np.asarray(c, dtype=float)
    if np.any(b < 0):
        raise LPError("right-hand side must be nonnegative")
    # columns: structural A then surplus -I
    full = np.hstack([A, -np.eye(m)])
    cost = np.concatenate([c, np.zeros(m)])
    basis = _unit_columns(A)
    B_inv = np.linalg.inv(full[:, basis])
    xb = B_inv @ b
    degenerate_run = 0
    bland = False
    for it in range(max_iter):
        if it % 64 == 63:
            B_inv = np.linalg.inv(full[:, basis])
            xb = B_inv @ b
        y = cost[basis] @ B_inv
        reduced = cost - y @ full
        reduced[basis] = 0.0
        if bland:
            cand = np.nonzero(reduced < -tol)[0]
            if cand.size == 0:
                break
            j = int(cand[0])
        else:
            j = int(np.argmin(reduced))
            if reduced[j] >= -tol:
                break
        d = B_inv @ full[:, j]
        pos = d > tol
        if not np.any(pos):
            raise LPError("covering LP reported unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(xb[pos], 0.0) / d[pos]
        theta = ratios.min()
        ties = np.nonzero(ratios <= theta + 1e-12)[0]
        # Bland: leave with the smallest basic column index among ties
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        if theta <= tol:
            degenerate_run += 1
            if degenerate_run > 50:
                bland = True
        else:
            degenerate_run = 0
        # pivot
        piv = d[r]
        row = B_inv[r] / piv
        B_inv -= np.outer(d, row)
        B_inv[r] = row
        xb = xb - theta * d
        xb[r] = theta
        basis[r] = j
    else:
        raise LPError("simplex iteration cap reached")
    B_inv = np.linalg.inv(full[:, basis])
    xb = B_inv @ b
    y = cost[basis] @ B_inv
    x = np.zeros(ncols + m)
    x[basis] = xb
    x = np.maximum(x, 0.0)
    return LPResult(x[:ncols], y, float(c @ x[:ncols]), list(basis))


def solve_covering_exact(A, b=None, c=None, max_iter: int = 100_000) -> LPResult:
    """Exact rational simplex; returns Fraction arrays (dtype=object)."""
    A = [[Fraction(int(v)) if float(v).is_integer() else Fraction(v) for v in row]
         for row in np.asarray(A)]
    m = len(A)
    ncols = len(A[0]) if m else 0
    b = [Fraction(1)] * m if b is None else [Fraction(v) for v in b]
    c = [Fraction(1)] * ncols if c is None else [Fraction(v) for v in c]
    basis = _unit_columns(np.asarray([[float(v) for v in row] for row in A]))
    total = ncols + m
    # tableau rows: [A | -I | b], transformed to B^-1 [A | -I | b]
    T = [A[i] + [Fraction(-1) if k == i else Fraction(0) for k in range(m)] + [b[i]]
         for i in range(m)]
    cost = c + [Fraction(0)] * m

    def pivot(r, j):
        pv = T[r][j]
        T[r] = [v / pv for v in T[r]]
        for i in range(m):
            if i != r and T[i][j] != 0:
                f = T[i][j]
                T[i] = [vi - f * vr for vi, vr in zip(T[i], T[r])]
        basis[r] = j

    # bring the starting basis into canonical form
    for r, j in enumerate(list(basis)):
        pivot(r, j)
    for _ in range(max_iter):
        reduced = [cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(m))
                   for j in range(total)]
        enter = next((j for j in range(total) if j not in basis and reduced[j] < 0), None)
        if enter is None:
            break
        best_r, best_ratio = None, None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[best_r])):
                    best_r, best_ratio = i, ratio
        if best_r is None:
            raise LPError("covering LP reported unbounded")
        pivot(best_r, enter)
    else:
        raise LPError("exact simplex iteration cap reached")
    x = [Fraction(0)] * total
    for i in range(m):
        x[basis[i]] = T[i][-1]
    # the dual of row i equals the reduced cost of its surplus column
    y = []
    for i in range(m):
        col = ncols + i
        y.append(cost[col] - sum(cost[basis[k]] * T[k][col] for k in range(m)))
    obj = sum(ci * xi for ci, xi in zip(c, x[:ncols]))
    return LPResult(np.array(x[:ncols], dtype=object), np.array(y, dtype=object), obj, list(basis))
