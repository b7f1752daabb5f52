import numpy as np
import pytest
from hypothesis import given, strategies as st

from bsod.errors import DimensionMismatch, InvalidEpsilon, NonFiniteInput
from bsod.graph import brute_force_graph, build_epsilon_graph, laplacian_apply

from conftest import dense_from_graph, dense_laplacian


def edges(graph):
    return {(i, int(j)) for i in range(graph.n) for j in graph.neighbors_of(i) if i < j}


def test_line_of_three():
    g = build_epsilon_graph([[0.0], [0.4], [0.8]], 0.5)
    assert edges(g) == {(0, 1), (1, 2)}
    assert g.degrees.tolist() == [1, 2, 1]
    assert g.edge_count == 2


def test_single_point():
    g = build_epsilon_graph([[3.0, 4.0]], 0.5)
    assert g.edge_count == 0
    assert g.degrees.tolist() == [0]


def test_equilateral_triangle_is_complete():
    side = 0.3
    pts = [[0, 0], [side, 0], [side / 2, side * np.sqrt(3) / 2]]
    g = build_epsilon_graph(pts, 0.5)
    assert edges(g) == {(0, 1), (0, 2), (1, 2)}
    assert g.degrees.tolist() == [2, 2, 2]


def test_duplicate_points_are_connected():
    g = brute_force_graph([[0.0, 0.0], [0.0, 0.0]], 0.5)
    assert edges(g) == {(0, 1)}
    assert build_epsilon_graph([[0.0, 0.0], [0.0, 0.0]], 0.5) == g


def test_boundary_distance_is_inclusive():
    g = build_epsilon_graph([[0.0], [0.5], [1.0], [1.75]], 0.5)
    assert edges(g) == {(0, 1), (1, 2)}


@pytest.mark.parametrize("eps", [0, -1.0, float("nan"), float("inf")])
def test_invalid_eps(eps):
    with pytest.raises(InvalidEpsilon):
        build_epsilon_graph([[0.0], [1.0]], eps)
    with pytest.raises(InvalidEpsilon):
        brute_force_graph([[0.0], [1.0]], eps)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_points(bad):
    with pytest.raises(NonFiniteInput):
        build_epsilon_graph([[0.0, 1.0], [bad, 0.0]], 0.5)


def test_rejects_non_matrix_input():
    with pytest.raises(DimensionMismatch):
        build_epsilon_graph([0.0, 1.0], 0.5)


def test_canonical_form(rng):
    g = build_epsilon_graph(rng.uniform(size=(300, 2)), 0.15)
    for i in range(g.n):
        nb = g.neighbors_of(i)
        assert np.all(np.diff(nb) > 0)
        assert i not in nb
        for j in nb:
            assert i in g.neighbors_of(j)
    assert g.degrees.sum() == 2 * g.edge_count


def test_matches_dense_definition(rng):
    pts = rng.uniform(size=(40, 2))
    g = build_epsilon_graph(pts, 0.25)
    np.testing.assert_array_equal(dense_from_graph(g), dense_laplacian(pts, 0.25))


def test_random_uniform_square_matches_brute_force():
    for seed in range(20):
        pts = np.random.default_rng(seed).uniform(size=(100, 2))
        assert build_epsilon_graph(pts, 0.2) == brute_force_graph(pts, 0.2)


def test_grid_handles_widely_spread_points():
    # Cell keys would overflow int64 without per-axis compression.
    pts = np.array([[0.0, 0, 0, 0], [1e12, 0, 0, 0], [1e12, 1e12, 1e12, 1e12],
                    [1e12 + 0.1, 1e12, 1e12, 1e12]])
    g = build_epsilon_graph(pts, 0.5)
    assert edges(g) == {(2, 3)}


def test_high_dimension_falls_back(rng):
    pts = rng.normal(size=(60, 7))
    assert build_epsilon_graph(pts, 2.5) == brute_force_graph(pts, 2.5)


@given(
    n=st.integers(1, 120),
    d=st.integers(1, 5),
    eps=st.floats(0.01, 1.5),
    seed=st.integers(0, 2**32 - 1),
    lattice=st.booleans(),
)
def test_indexed_builder_equals_brute_force(n, d, eps, seed, lattice):
    r = np.random.default_rng(seed)
    if lattice:
        # Points on a coarse lattice create many exact-boundary distances.
        pts = r.integers(0, 4, size=(n, d)) * 0.5
        eps = 0.5
    else:
        pts = r.uniform(-1, 1, size=(n, d))
    assert build_epsilon_graph(pts, eps) == brute_force_graph(pts, eps)


def test_laplacian_path_graph():
    g = build_epsilon_graph([[0.0], [1.0], [2.0]], 1.0)
    np.testing.assert_array_equal(laplacian_apply(g, [0.0, 1.0, 0.0]), [-1.0, 2.0, -1.0])


def test_laplacian_edgeless_graph_is_zero(rng):
    g = build_epsilon_graph([[0.0], [5.0], [10.0]], 1.0)
    np.testing.assert_array_equal(laplacian_apply(g, rng.normal(size=3)), np.zeros(3))


def test_laplacian_dimension_mismatch():
    g = build_epsilon_graph([[0.0], [1.0]], 1.0)
    with pytest.raises(DimensionMismatch):
        laplacian_apply(g, [1.0, 2.0, 3.0])


def test_laplacian_matches_dense(rng):
    pts = rng.uniform(size=(50, 2))
    g = build_epsilon_graph(pts, 0.3)
    x = rng.normal(size=50)
    np.testing.assert_allclose(laplacian_apply(g, x), dense_laplacian(pts, 0.3) @ x, atol=1e-12)


@given(
    n=st.integers(2, 80),
    eps=st.floats(0.05, 1.0),
    seed=st.integers(0, 2**32 - 1),
)
def test_laplacian_properties(n, eps, seed):
    r = np.random.default_rng(seed)
    g = build_epsilon_graph(r.uniform(size=(n, 2)), eps)
    np.testing.assert_array_equal(laplacian_apply(g, np.ones(n)), np.zeros(n))
    x, y = r.normal(size=n), r.normal(size=n)
    Lx, Ly = laplacian_apply(g, x), laplacian_apply(g, y)
    assert x @ Lx >= -1e-12 * (x @ x)
    assert abs(x @ Ly - y @ Lx) <= 1e-12 * max(1.0, abs(x @ Ly)) * max(1, g.degrees.max())
    assert g.degrees.sum() == 2 * g.edge_count
