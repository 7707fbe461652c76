import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import grid_radial_max, max_subset_in_disc
from rgglab.geometry import NormSpec
from rgglab.limits import FunctionProfile, RadialLevels, phi_beta, phi_zero, solve_c, xi
from rgglab.rgg import DensityModel, radius_for_t, sample_points
from rgglab.scan import (ScanResult, count_in_ball, expected_scan, radial_sum_at, scan_ball,
                         scan_radial)

E2 = NormSpec(2, 2)


def test_scan_result_exact_has_no_gap():
    with pytest.raises(ValueError):
        ScanResult(3.0, np.zeros(2), True, 0.5)


def test_trivial_examples():
    res = scan_ball(np.array([[0.3, 0.7]]), 0.1, E2)
    assert res.value == 1 and res.exact and np.allclose(res.center, [0.3, 0.7])
    assert scan_ball(np.array([[0.0, 0.0], [0.3, 0.0]]), 0.1, E2).value == 1
    assert scan_ball(np.array([[0.0, 0.0], [0.2, 0.0]]), 0.1, E2).value == 2
    assert scan_ball(np.zeros((0, 2)), 0.1, E2).value == 0
    with pytest.raises(ValueError):
        scan_ball(np.zeros((1, 2)), 0.0, E2)


def test_scan_ball_matches_enclosing_disc_oracle():
    rng = np.random.default_rng(2024)
    for trial in range(40):
        n = int(rng.integers(2, 16))
        pts = rng.random((n, 2))
        rho = float(rng.uniform(0.05, 0.4))
        res = scan_ball(pts, rho, E2)
        assert res.exact
        assert res.value == max_subset_in_disc(pts, rho)
        assert count_in_ball(pts, res.center, rho, E2) == res.value


def test_scan_radial_against_grid_oracle():
    rng = np.random.default_rng(77)
    for trial in range(6):
        n = int(rng.integers(3, 10))
        r = 1.0
        pts = rng.random((n, 2)) * 1.2
        phi = phi_beta(float(rng.uniform(0.1, 0.9)), E2)
        res = scan_radial(pts, phi, r)
        grid = grid_radial_max(pts, r * phi.radii, phi.nested_weights(), r * phi.outer_radius, r / 250)
        assert res.value >= grid - 1e-12
        assert res.value <= grid + phi.values.max() + 1e-12
        assert radial_sum_at(pts, phi, r, res.center) == pytest.approx(res.value, abs=1e-12)


def test_single_ring_equals_scan_ball():
    for seed in range(10):
        pts = sample_points(DensityModel.uniform(2), 200, seed).points
        phi = RadialLevels(E2, [(0.5, 1.0)])
        assert scan_radial(pts, phi, 0.1).value == scan_ball(pts, 0.05, E2).value


def test_beta_one_cluster_gives_half():
    rng = np.random.default_rng(5)
    r, m = 0.2, 9
    pts = 0.5 + (rng.random((m, 2)) - 0.5) * (r / 4)
    phi = phi_beta(1.0, E2)
    assert len(phi.rings) == 1
    assert scan_radial(pts, phi, r).value == pytest.approx(m / 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 2 * math.pi))
def test_translation_and_rotation_invariance(seed, dx, dy, angle):
    pts = np.random.default_rng(seed).random((60, 2))
    base = scan_ball(pts, 0.12, E2).value
    rot = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    moved = pts @ rot.T + np.array([dx, dy])
    assert scan_ball(moved, 0.12, E2).value == base


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(0.01, 0.2), st.floats(0, 0.1))
def test_monotone_in_rho(seed, rho, extra):
    pts = np.random.default_rng(seed).random((80, 2))
    assert scan_ball(pts, rho, E2).value <= scan_ball(pts, rho + extra, E2).value


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(0.0, 1.0))
def test_witness_reproduces_value(seed, beta):
    pts = np.random.default_rng(seed).random((50, 2))
    phi = phi_beta(beta, E2)
    res = scan_radial(pts, phi, 0.2)
    assert radial_sum_at(pts, phi, 0.2, res.center) == res.value


@pytest.mark.parametrize("p,d", [(math.inf, 2), (1.0, 2), (2.0, 3)])
def test_grid_scan_is_certified(p, d):
    norm = NormSpec(p, d)
    pts = sample_points(DensityModel.uniform(d), 150, 9).points
    res = scan_ball(pts, 0.15, norm)
    assert not res.exact and res.gap >= 0
    assert count_in_ball(pts, res.center, 0.15, norm) == res.value
    # a brute force over a coarse candidate set never beats the certified upper bound
    cand = np.vstack([pts, sample_points(DensityModel.uniform(d), 2000, 10).points])
    best = max(count_in_ball(pts, c, 0.15, norm) for c in cand)
    assert best <= res.value + res.gap


def test_line_scan_exact():
    norm = NormSpec(2, 1)
    pts = np.array([[0.0], [0.1], [0.2], [0.25], [0.9]])
    res = scan_ball(pts, 0.1, norm)
    assert res.exact and res.value == 3


def test_expected_scan_examples():
    n, r, t = 1e5, 0.01, 3.0
    w = 0.7
    ind = FunctionProfile([(1.0, w)])
    assert expected_scan(ind, n, r, 1.0, t, 2) == pytest.approx(n * r * r * solve_c(w, t), rel=1e-10)
    prof = phi_beta(0.4, E2).to_profile()
    assert expected_scan(prof, n, r, 2.0, math.inf, 2) == pytest.approx(2 * n * r * r * prof.integral(),
                                                                       rel=1e-12)
    assert expected_scan(prof, n, r, 2.0, 1e8, 2) == pytest.approx(2 * n * r * r * prof.integral(),
                                                                  rel=1e-3)


def test_empirical_scan_matches_weighted_integral():
    n = 30_000
    prof = phi_zero(E2).to_profile()
    for t in (1.0, 4.0):
        r = radius_for_t(n, t, 1.0, 2)
        vals = [scan_ball(sample_points(DensityModel.uniform(2), n, s).points, r / 2, E2).value / (n * r * r)
                for s in range(10)]
        assert abs(np.mean(vals) / xi(prof, t) - 1) < 0.2
