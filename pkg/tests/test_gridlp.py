import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgglab.geometry import NormSpec
from rgglab.graphkit import GridLPBudgetExceeded, grid_lp_colouring
from rgglab.graphkit.gridlp import cell_graph, step_scan_values, step_value_at
from rgglab.rgg import DensityModel, build_graph, radius_for_t, sample_points

E2 = NormSpec(2, 2)


def test_cell_graph_shape():
    cg = cell_graph(E2, 0.5, 2)
    assert cg.offsets.shape == (16, 2)
    # reach 1 + 0.5*sqrt(2) spans ceil(3.41) = 4 cells
    assert cg.L == 4
    assert cg.incidence.shape == (16, len(cg.stable_sets))
    for k, S in enumerate(cg.stable_sets):
        assert cg.graph.is_stable(list(S))
        assert cg.incidence[:, k].sum() == len(S)
    # a cell is adjacent to every cell within distance one; all singletons are present
    assert all((v,) in cg.stable_sets for v in range(16))


def test_empty_cloud():
    res = grid_lp_colouring(np.zeros((0, 2)), 0.1, E2, 0.5, 2)
    assert res.colouring.palette == 0
    assert res.guarantee == 16 * 8 ** 2


def test_single_cluster_needs_its_size():
    rng = np.random.default_rng(3)
    pts = 0.5 + 1e-4 * rng.random((40, 2))
    res = grid_lp_colouring(pts, 0.1, E2, 0.5, 2)
    g = build_graph_from(pts, 0.1)
    assert g.is_proper_colouring(res.colouring.colours)
    assert 40 <= res.colouring.palette <= res.guarantee
    # the step function of a lone cell dual sees the whole cluster
    assert res.max_scan == pytest.approx(40 * res.duals.max(), rel=1e-9)


def build_graph_from(pts, r, norm=E2):
    from rgglab.rgg import PointCloud
    return build_graph(PointCloud(pts, 0), r, norm)


@pytest.mark.parametrize("p,d,eps,K", [(2.0, 2, 0.5, 2), (2.0, 2, 0.5, 1), (math.inf, 2, 0.5, 2),
                                       (2.0, 1, 0.25, 2), (1.0, 2, 1.0, 2)])
def test_colouring_proper_and_within_guarantee(p, d, eps, K):
    norm = NormSpec(p, d)
    for seed in range(3):
        cloud = sample_points(DensityModel.uniform(d), 300, 40 + seed)
        r = radius_for_t(300, [2.0, 10.0, 40.0][seed], 1.0, d)
        res = grid_lp_colouring(cloud.points, r, norm, eps, K)
        g = build_graph(cloud, r, norm)
        assert g.is_proper_colouring(res.colouring.colours)
        assert res.colouring.palette <= res.shift_palettes.sum()
        cg = cell_graph(norm, eps, K)
        period = 2 * K + cg.L
        expect = (period / (2 * K)) ** d * res.scan_values.max() + (2 * K) ** d * period ** d
        assert res.guarantee == pytest.approx(expect, rel=1e-12)
        assert res.colouring.palette <= res.guarantee


def test_budget_exceeded():
    with pytest.raises(GridLPBudgetExceeded):
        cell_graph(E2, 0.25, 3, max_sets=50)


def _oracle_step_scan(scaled, y, offsets, eps, K):
    """Enumerate x = eps*(k + a) with a drawn from the points' fractional parts, placed just
    inside the half-open cells, and every integer k that puts some point in the window."""
    u = scaled / eps
    base = np.floor(u).astype(int)
    frac = u - base
    d = scaled.shape[1]
    best = 0.0
    avals = [np.unique(np.append(frac[:, j], 0.0)) for j in range(d)]
    for a in itertools.product(*avals):
        a = np.array(a)
        ks = set()
        for b in base:
            for o in itertools.product(range(-K - 1, K + 1), repeat=d):
                ks.add(tuple(b - np.array(o)))
        for k in ks:
            x = eps * (np.array(k) + a) - 1e-9 * eps
            best = max(best, step_value_at(scaled, y, offsets, eps, K, x))
    return best


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 2), st.integers(1, 2))
def test_step_scan_matches_enumeration(seed, d, K):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    eps = 0.5
    scaled = rng.random((n, d)) * 3
    offsets = np.array(list(itertools.product(range(-K, K), repeat=d)), dtype=np.int64)
    y = rng.random(len(offsets))
    got = step_scan_values(scaled, y[None, :], offsets, eps, K)[0]
    assert got == pytest.approx(_oracle_step_scan(scaled, y, offsets, eps, K), abs=1e-12)
    # random placements never beat the exact maximum
    for x in rng.random((50, d)) * 4 - 0.5:
        assert step_value_at(scaled, y, offsets, eps, K, x) <= got + 1e-12
