import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meplsim.topology import Topology, TopologyError, build_topology, general, grid, line, ring, torus


def nx_graph(t: Topology):
    g = nx.Graph()
    g.add_nodes_from(range(t.n))
    for h in range(t.n):
        for x in t.adjacent_neighbors(h):
            g.add_edge(h, x)
    return g


def nx_distances(t: Topology):
    g = nx_graph(t)
    D = np.zeros((t.n, t.n), dtype=np.int64)
    for a, row in nx.all_pairs_shortest_path_length(g):
        for b, dist in row.items():
            D[a, b] = dist
    return D


@pytest.mark.parametrize("t", [line(7), ring(9), ring(2), grid(2, 4), torus(2, 5), grid(3, 3), torus(3, 4),
                               torus(2, 2), grid(1, 1)])
def test_distance_matrix_matches_bfs_oracle(t):
    assert np.array_equal(t.distance_matrix, nx_distances(t))


def test_lattice_edges_match_networkx_generators():
    assert nx.is_isomorphic(nx_graph(grid(2, 4)), nx.grid_2d_graph(4, 4))
    assert nx.is_isomorphic(nx_graph(torus(2, 5)), nx.grid_2d_graph(5, 5, periodic=True))
    assert nx.is_isomorphic(nx_graph(ring(8)), nx.cycle_graph(8))


def test_general_graph_distances():
    g = nx.petersen_graph()
    t = general(list(g.edges()))
    assert np.array_equal(t.distance_matrix, nx_distances(t))
    assert t.distance(0, 7) == nx.shortest_path_length(g, 0, 7)


def test_distance_examples():
    assert grid(2, 4).distance(grid(2, 4).index((0, 0)), grid(2, 4).index((3, 3))) == 6
    assert torus(2, 4).distance(torus(2, 4).index((0, 0)), torus(2, 4).index((3, 3))) == 2
    assert ring(10).distance(0, 7) == 3
    t = grid(2, 5)
    assert all(t.distance(h, h) == 0 for h in range(t.n))


def test_row_major_coordinates():
    t = grid(2, 3)
    assert t.coords(5) == (1, 2)
    assert t.index((2, 0)) == 6
    assert np.array_equal(t.coord_array[5], [1, 2])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.data())
def test_coords_roundtrip(d, k, data):
    t = torus(d, k)
    h = data.draw(st.integers(0, t.n - 1))
    assert t.index(t.coords(h)) == h


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["grid", "torus"]), st.integers(1, 3), st.integers(2, 5), st.data())
def test_distance_is_a_metric(kind, d, k, data):
    t = build_topology({"kind": kind, "d": d, "k": k})
    a, b, c = (data.draw(st.integers(0, t.n - 1)) for _ in range(3))
    D = t.distance_matrix
    assert D[a, b] == D[b, a] == t.distance(a, b)
    assert D[a, c] <= D[a, b] + D[b, c]
    assert (D[a, b] == 0) == (a == b)


def test_knight_moves_grid_corner_and_center():
    t = grid(2, 5)
    assert [t.coords(h) for h in t.knight_neighbors(t.index((0, 0)))] == [(1, 2), (2, 1)]
    assert len(t.knight_neighbors(t.index((2, 2)))) == 8
    for h in range(t.n):
        for x in t.knight_neighbors(h):
            assert t.distance(h, x) == 3


def test_knight_moves_small_torus_dedupe():
    # on a 4x4 torus the eight offsets collapse onto four distinct hosts
    t = torus(2, 4)
    got = t.knight_neighbors(0)
    assert len(got) == 4
    offs = {((dx % 4), (dy % 4)) for dx, dy in [(1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1)]}
    assert sorted(t.index(o) for o in offs) == got
    assert len(torus(2, 6).knight_neighbors(0)) == 8


def test_knight_moves_rejected_off_2d():
    with pytest.raises(TopologyError):
        line(5).knight_neighbors(0)
    with pytest.raises(TopologyError):
        general([(0, 1)]).move_neighbors(0, "adjacent+knight")


def test_move_sets_are_symmetric():
    for t in (grid(2, 5), torus(2, 4), torus(2, 7)):
        for ms in ("adjacent", "adjacent+knight"):
            ptr, idx = t.move_csr(ms)
            pairs = {(h, int(x)) for h in range(t.n) for x in idx[ptr[h]:ptr[h + 1]]}
            assert all((b, a) in pairs for a, b in pairs)
            assert all(a != b for a, b in pairs)


def test_validation_errors():
    with pytest.raises(TopologyError):
        build_topology({"kind": "hypercube", "d": 2, "k": 2})
    with pytest.raises(TopologyError):
        build_topology({"kind": "grid", "d": 0, "k": 3})
    with pytest.raises(TopologyError):
        general([(0, 1), (2, 3)])
    with pytest.raises(TopologyError):
        build_topology({"kind": "general"})
    with pytest.raises(TopologyError):
        grid(2, 3).coords(9)
    with pytest.raises(TopologyError):
        grid(2, 3).move_neighbors(0, "queen")


def test_spec_roundtrip_and_read_only():
    for t in (grid(2, 3), torus(3, 2), general([(0, 1), (1, 2)])):
        t2 = build_topology(t.to_spec())
        assert np.array_equal(t.distance_matrix, t2.distance_matrix)
    with pytest.raises(ValueError):
        grid(2, 3).distance_matrix[0, 1] = 5
