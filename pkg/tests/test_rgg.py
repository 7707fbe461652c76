import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_pairs_edges
from rgglab.geometry import NormSpec
from rgglab.limits import classify_regime
from rgglab.rgg import (DensityModel, PointCloud, all_pairs_graph, build_graph, radius_for_t,
                        read_points, sample_points, write_points)
from rgglab.rng import splitmix64, uniforms

E2 = NormSpec(2, 2)


def test_splitmix_reference_vector():
    # first outputs of the published SplitMix64 generator started from state 0
    out = splitmix64(0, np.arange(3))
    assert [hex(int(v)) for v in out] == ["0xe220a8397b1dcdaf", "0x6e789e6aa1b965f4",
                                          "0x6c45d188009454f"]


def test_uniforms_range_and_counter_independence():
    u = uniforms(42, np.arange(10_000))
    assert u.min() >= 0 and u.max() < 1
    assert np.array_equal(uniforms(42, [5, 7]), u[[5, 7]])


def test_sampling_is_deterministic():
    m = DensityModel.uniform(2)
    a = sample_points(m, 1000, 7)
    b = sample_points(m, 1000, 7)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, sample_points(m, 1000, 8).points)
    # a longer sample extends a shorter one
    assert np.array_equal(sample_points(m, 1500, 7).points[:1000], a.points)


def test_half_cube_model():
    m = DensityModel.half_cube(2)
    assert m.sigma == 2.0
    pts = sample_points(m, 5000, 3).points
    assert np.all(pts[:, 0] <= 0.5) and np.all(pts >= 0) and np.all(pts <= 1)


def test_density_validation():
    with pytest.raises(ValueError):
        DensityModel("block-density", 2, np.ones((2, 2)) * 2)
    with pytest.raises(ValueError):
        DensityModel("gaussian", 2)
    with pytest.raises(ValueError):
        DensityModel("block-density", 2, np.ones((2, 3)))
    with pytest.raises(ValueError):
        sample_points(DensityModel.uniform(2), 0, 1)


def test_uniform_binomial_check():
    n = 100_000
    for d in (1, 2, 3):
        pts = sample_points(DensityModel.uniform(d), n, 99).points
        k = np.all(pts <= 0.5, axis=1).sum()
        p = 0.5 ** d
        assert abs(k - n * p) <= 4 * math.sqrt(n * p * (1 - p))


def test_block_model_proportions():
    b = np.array([[0.5, 1.5], [1.0, 1.0]])
    m = DensityModel("block-density", 2, b)
    assert m.sigma == 1.5
    pts = sample_points(m, 40_000, 5).points
    cell = (pts[:, 0] >= 0.5) * 2 + (pts[:, 1] >= 0.5)
    freq = np.bincount(cell, minlength=4) / len(pts)
    assert np.allclose(freq, b.ravel() / 4, atol=0.01)


def test_radius_for_t():
    assert radius_for_t(math.e ** 2, 1, 1, 1) == pytest.approx(2 / math.e ** 2)
    assert radius_for_t(1e5, 2, 1, 2) == pytest.approx(math.sqrt(2 * math.log(1e5) / 1e5))
    assert radius_for_t(1e5, 2, 1, 2) == pytest.approx(0.01517, abs=1e-5)
    for t in (0.01, 0.5, 3.0, 99.0):
        r = radius_for_t(1e5, t, 1.5, 2)
        lab = classify_regime(100_000, r, 2, 1.5)
        assert lab.kind == "Intermediate" and lab.t == pytest.approx(t)


def _edge_set(g):
    return {tuple(e) for e in g.edges().tolist()}


@pytest.mark.parametrize("p", [2.0, math.inf, 1.0, 3.5])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_build_graph_matches_all_pairs(p, d):
    norm = NormSpec(p, d)
    for seed in range(4):
        cloud = sample_points(DensityModel.uniform(d), 100 + 300 * seed, seed)
        r = [0.02, 0.08, 0.2, 0.5][seed] * (1 if d > 1 else 0.3)
        g = build_graph(cloud, r, norm)
        assert _edge_set(g) == _edge_set(all_pairs_graph(cloud, r, norm))


def test_build_graph_matches_plain_loop_oracle():
    cloud = sample_points(DensityModel.uniform(2), 100, 12)
    for r in (0.05, 0.15, 0.4):
        assert _edge_set(build_graph(cloud, r, E2)) == set(all_pairs_edges(cloud.points, r))


def test_build_graph_structure():
    cloud = sample_points(DensityModel.uniform(2), 500, 1)
    g = build_graph(cloud, 0.1, E2)
    for v in range(g.n):
        row = g.neighbors(v)
        assert np.all(np.diff(row) > 0)
        assert v not in row
        for u in row:
            assert g.has_edge(int(u), v)


def test_boundary_tie_is_an_edge():
    for p in (2.0, 1.0, math.inf, 3.0):
        cloud = PointCloud(np.array([[0.0, 0.0], [0.5, 0.0]]), 0)
        assert build_graph(cloud, 0.5, NormSpec(p, 2)).num_edges == 1


def test_large_radius_gives_complete_graph():
    cloud = sample_points(DensityModel.uniform(3), 60, 4)
    g = build_graph(cloud, 2.0, NormSpec(2, 3))
    assert g.num_edges == 60 * 59 // 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 0.3), st.floats(0.0, 0.2))
def test_edge_count_monotone_in_r(seed, r, extra):
    cloud = sample_points(DensityModel.uniform(2), 300, seed)
    small = _edge_set(build_graph(cloud, r, E2))
    big = _edge_set(build_graph(cloud, r + extra, E2))
    assert small <= big


def test_interior_degree_matches_area():
    n, r = 5000, 0.02
    ratios = []
    for seed in range(20):
        cloud = sample_points(DensityModel.uniform(2), n, 1000 + seed)
        g = build_graph(cloud, r, E2)
        pts = cloud.points
        interior = np.all((pts > r) & (pts < 1 - r), axis=1)
        ratios.append(g.degrees()[interior].mean() / ((n - 1) * math.pi * r * r))
    assert abs(np.mean(ratios) - 1) < 0.1


def test_point_file_round_trip(tmp_path):
    cloud = sample_points(DensityModel.half_cube(2), 50, 77)
    path = tmp_path / "cloud.txt"
    write_points(path, cloud)
    back = read_points(path)
    assert np.array_equal(back.points, cloud.points)
    assert back.seed == 77 and back.sigma == 2.0
    assert path.read_text().splitlines()[0] == "2 50 77 2.0"


def test_point_file_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 3\n0 0\n")
    with pytest.raises(ValueError):
        read_points(path)
