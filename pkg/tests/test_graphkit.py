import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chromatic_number, max_clique_size
from rgglab.geometry import NormSpec, separated_count_upper
from rgglab.graphkit import (ExactUnavailable, Graph, best_greedy, chromatic_bounds,
                             chromatic_number_exact, clique_number, dsatur, dual_bound,
                             fractional_chromatic, fractional_chromatic_exhaustive,
                             greedy_colouring, max_weight_stable_set, read_edges, write_edges)
from rgglab.graphkit.colouring import ColouringResult
from rgglab.graphkit.simplex import LPError, solve_covering, solve_covering_exact
from rgglab.limits import FeasibleCatalog, phi_zero
from rgglab.rgg import DensityModel, PointCloud, build_graph, sample_points

E2 = NormSpec(2, 2)


def random_geometric(n, seed, r, d=2, p=2.0):
    cloud = sample_points(DensityModel.uniform(d), n, seed)
    return build_graph(cloud, r, NormSpec(p, d))


def random_graph(n, density, seed):
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return Graph.from_edges(n, edges)


# ------------------------------------------------------------------ graph

def test_graph_basics():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (1, 0), (2, 2)])
    assert g.num_edges == 2
    assert g.edges().tolist() == [[0, 1], [1, 2]]
    assert g.has_edge(2, 1) and not g.has_edge(0, 2)
    assert [c.tolist() for c in g.components()] == [[0, 1, 2], [3]]
    sub = g.subgraph([1, 2, 3])
    assert sub.edges().tolist() == [[0, 1]]
    assert g.is_proper_colouring([0, 1, 0, 0]) and not g.is_proper_colouring([0, 0, 1, 0])
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 5)])


def test_colouring_result_checks_palette():
    with pytest.raises(ValueError):
        ColouringResult(np.array([0, 1, 1]), 3, "greedy")


# ----------------------------------------------------------------- clique

def test_clique_trivial():
    assert clique_number(Graph.complete(3))[0] == 3
    assert clique_number(Graph.from_edges(5, []))[0] == 1
    assert clique_number(Graph.from_edges(0, []))[0] == 0
    assert clique_number(Graph.cycle(5))[0] == 2


def test_clique_matches_subset_enumeration():
    for seed in range(60):
        g = random_geometric(12, seed, [0.2, 0.35, 0.5][seed % 3])
        omega, witness = clique_number(g)
        assert g.is_clique(witness) and len(witness) == omega
        assert omega == max_clique_size(12, g.edges().tolist())


@pytest.mark.parametrize("method", ["bnb", "lens"])
def test_clique_methods_match_networkx(method):
    for seed in range(40):
        n = [30, 80, 200, 400][seed % 4]
        g = random_geometric(n, 500 + seed, [0.05, 0.12, 0.25, 0.4][seed // 4 % 4])
        omega, witness = clique_number(g, method)
        G = nx.Graph()
        G.add_nodes_from(range(n))
        G.add_edges_from(g.edges().tolist())
        assert omega == max(len(q) for q in nx.find_cliques(G))
        assert g.is_clique(witness) and len(witness) == omega


def test_clique_non_geometric_and_other_norms():
    for seed in range(30):
        g = random_graph(25, 0.5, seed)
        G = nx.Graph()
        G.add_nodes_from(range(25))
        G.add_edges_from(g.edges().tolist())
        assert clique_number(g)[0] == max(len(q) for q in nx.find_cliques(G))
    g = random_geometric(300, 4, 0.15, p=math.inf)
    G = nx.Graph(g.edges().tolist())
    assert clique_number(g)[0] == max(len(q) for q in nx.find_cliques(G))


def test_lens_requires_planar_euclidean():
    g = random_geometric(50, 1, 0.2, d=3)
    with pytest.raises(ValueError):
        clique_number(g, "lens")


# --------------------------------------------------------------- colouring

def test_exact_chromatic_trivial():
    assert chromatic_number_exact(Graph.cycle(5))[0] == 3
    assert chromatic_number_exact(Graph.complete(4))[0] == 4
    assert chromatic_number_exact(Graph.cycle(6))[0] == 2
    assert chromatic_number_exact(Graph.from_edges(3, []))[0] == 1
    assert chromatic_number_exact(Graph.from_edges(0, []))[0] == 0


def test_exact_chromatic_matches_inclusion_exclusion():
    for seed in range(60):
        g = random_geometric(12, 1000 + seed, [0.3, 0.5, 0.7][seed % 3])
        chi, res = chromatic_number_exact(g)
        assert g.is_proper_colouring(res.colours) and res.palette == chi
        assert chi == chromatic_number(12, g.edges().tolist())


def test_exact_chromatic_dense_random_graphs():
    for seed in range(15):
        g = random_graph(11, 0.5, 50 + seed)
        chi, res = chromatic_number_exact(g)
        assert g.is_proper_colouring(res.colours)
        assert chi == chromatic_number(11, g.edges().tolist())


def test_exact_chromatic_budget():
    # Mycielski-style graphs are hard for colouring search; a tiny budget must give up
    g = nx.mycielski_graph(6)
    G = Graph.from_edges(g.number_of_nodes(), list(g.edges()))
    with pytest.raises(ExactUnavailable):
        chromatic_number_exact(G, node_budget=50, max_component=1000)
    with pytest.raises(ExactUnavailable):
        chromatic_number_exact(G, max_component=10)


def test_greedy_colourings_proper():
    g = random_geometric(800, 3, 0.08)
    for res in (greedy_colouring(g), dsatur(g), best_greedy(g)):
        assert g.is_proper_colouring(res.colours)
        assert res.palette <= g.max_degree() + 1


def test_chromatic_bounds_examples():
    b = chromatic_bounds(Graph.complete(7))
    assert (b.lower, b.upper) == (7, 7)
    b = chromatic_bounds(Graph.cycle(5), dual_value=2.5)
    assert b.lower >= 3 and b.upper == 3


def test_chromatic_bounds_on_sampled_graphs():
    for seed in range(10):
        g = random_geometric(300, 70 + seed, 0.1)
        b = chromatic_bounds(g)
        omega, _ = clique_number(g)
        assert b.lower <= b.upper <= g.max_degree() + 1
        assert len(b.clique) <= omega <= b.upper
        assert g.is_clique(b.clique)
        assert g.is_proper_colouring(b.colouring.colours)


def test_covering_bound_chi_at_most_k_omega():
    """Points within distance r/2 of a cell form a clique, so chi <= (#cells per colour class) * omega."""
    for seed in range(8):
        g = random_geometric(200, 900 + seed, 0.15)
        omega, _ = clique_number(g)
        chi_ub = best_greedy(g).palette
        # a grid of side r/(2 sqrt 2) puts each cell inside a ball of diameter r; cells at
        # offsets up to ceil(2 sqrt 2) + 1 apart never share an edge, giving k cell classes
        k = separated_count_upper(E2, 2 * math.sqrt(2) + 2)
        assert chi_ub <= k * omega


# -------------------------------------------------------------- simplex

def test_simplex_small_known_lp():
    # min x1 + x2 + x3 over a covering of three rows by three pairs and three singletons
    A = np.array([[1, 0, 0, 1, 0, 1], [0, 1, 0, 1, 1, 0], [0, 0, 1, 0, 1, 1]], dtype=float)
    lp = solve_covering(A)
    assert lp.objective == pytest.approx(1.5)
    assert np.all(A @ lp.x >= 1 - 1e-9)
    assert lp.y.sum() == pytest.approx(1.5)
    ex = solve_covering_exact(A)
    assert ex.objective == Fraction(3, 2)
    assert sum(ex.y) == Fraction(3, 2)


def test_simplex_needs_unit_columns():
    with pytest.raises(LPError):
        solve_covering(np.array([[1.0, 1.0], [1.0, 1.0]]))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 8), st.integers(0, 2 ** 31))
def test_simplex_matches_scipy(m, extra, seed):
    from scipy.optimize import linprog
    rng = np.random.default_rng(seed)
    A = np.hstack([np.eye(m), (rng.random((m, extra)) < 0.5).astype(float)])
    b = rng.integers(0, 4, size=m).astype(float)
    ref = linprog(np.ones(A.shape[1]), A_ub=-A, b_ub=-b, bounds=(0, None), method="highs")
    lp = solve_covering(A, b)
    ex = solve_covering_exact(A, b)
    assert lp.objective == pytest.approx(ref.fun, abs=1e-9)
    assert float(ex.objective) == pytest.approx(ref.fun, abs=1e-12)
    # dual feasibility and strong duality for both solvers
    assert np.all(A.T @ lp.y <= 1 + 1e-9) and np.all(lp.y >= -1e-12)
    assert b @ lp.y == pytest.approx(lp.objective, abs=1e-9)
    yex = np.array([float(v) for v in ex.y])
    assert np.all(A.T @ yex <= 1 + 1e-12) and sum(bi * yi for bi, yi in zip(b, ex.y)) == ex.objective


# ------------------------------------------------------------ fractional

def test_fractional_known_values():
    c5 = fractional_chromatic(Graph.cycle(5))
    assert c5.objective == pytest.approx(2.5, abs=1e-9)
    c5.check(Graph.cycle(5), 1e-9)
    assert fractional_chromatic(Graph.complete(6)).objective == pytest.approx(6.0, abs=1e-9)
    assert fractional_chromatic(Graph.cycle(7)).objective == pytest.approx(7 / 3, abs=1e-9)
    petersen = nx.petersen_graph()
    g = Graph.from_edges(10, list(petersen.edges()))
    assert fractional_chromatic(g).objective == pytest.approx(2.5, abs=1e-9)


def test_fractional_matches_exhaustive_lp():
    for seed in range(60):
        n = 2 + seed % 7
        g = random_geometric(n, seed, [0.3, 0.5, 0.7][seed % 3])
        sol = fractional_chromatic(g)
        sol.check(g, 1e-6)
        assert sol.objective == pytest.approx(float(fractional_chromatic_exhaustive(g)), abs=1e-6)


def test_fractional_sandwich_on_random_graphs():
    for seed in range(20):
        g = random_graph(10, 0.45, 300 + seed)
        sol = fractional_chromatic(g)
        sol.check(g, 1e-6)
        omega, _ = clique_number(g)
        chi, _ = chromatic_number_exact(g)
        assert omega - 1e-6 <= sol.objective <= chi + 1e-6
        assert abs(sol.objective - sol.dual_objective) <= 2e-9


def test_max_weight_stable_set_bruteforce():
    rng = np.random.default_rng(8)
    for seed in range(30):
        g = random_graph(11, 0.4, seed)
        w = rng.random(11)
        S, val = max_weight_stable_set(g, w)
        assert g.is_stable(S)
        assert val == pytest.approx(w[S].sum())
        best = 0.0
        for mask in range(1 << 11):
            verts = [v for v in range(11) if mask >> v & 1]
            if g.is_stable(verts):
                best = max(best, w[verts].sum())
        assert val == pytest.approx(best)


def test_dual_bound_examples():
    # a tight cluster fits inside one ball of radius r/2
    pts = 0.3 + 0.001 * np.random.default_rng(1).random((9, 2))
    assert dual_bound(pts, 0.1, E2, phi_zero(E2)) == 9
    for e in FeasibleCatalog.default(E2, n_beta=4).entries:
        if hasattr(e.function, "rings"):
            assert dual_bound(np.zeros((0, 2)), 0.1, E2, e.function) == 0.0


def test_dual_bound_below_fractional_value():
    cat = FeasibleCatalog.default(E2, n_beta=6)
    radial = [e.function for e in cat.entries if hasattr(e.function, "rings")]
    for seed in range(10):
        cloud = sample_points(DensityModel.uniform(2), 40, 40 + seed)
        r = 0.2 + 0.02 * seed
        g = build_graph(cloud, r, E2)
        chi_f = fractional_chromatic(g).objective
        for phi in radial:
            assert dual_bound(cloud.points, r, E2, phi) <= chi_f + 1e-6


# -------------------------------------------------------------------- io

def test_edge_list_round_trip(tmp_path):
    g = random_geometric(60, 2, 0.2)
    path = tmp_path / "g.txt"
    write_edges(path, g)
    lines = path.read_text().splitlines()
    assert lines[0] == f"60 {g.num_edges}"
    back = read_edges(path)
    assert back.n == 60 and np.array_equal(back.edges(), g.edges())
    empty = tmp_path / "e.txt"
    write_edges(empty, Graph.from_edges(3, []))
    assert read_edges(empty).n == 3


def test_edge_list_rejects_bad_rows(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 2\n0 1\n")
    with pytest.raises(ValueError):
        read_edges(path)
    path.write_text("3 1\n0 7\n")
    with pytest.raises(ValueError):
        read_edges(path)


def test_cluster_graph_small():
    cloud = PointCloud(np.array([[0.5, 0.5], [0.52, 0.5], [0.5, 0.53]]), 0)
    g = build_graph(cloud, 0.1, E2)
    assert clique_number(g)[0] == 3 and chromatic_number_exact(g)[0] == 3
