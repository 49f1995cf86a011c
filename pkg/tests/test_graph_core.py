import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minorvc.graph_core import INF, UNREACHABLE, Graph, GraphFormatError, SizeCapError, \
    all_pairs, components, cycle, format_graph, generate, grid, is_connected, \
    is_strongly_connected, multi_source_rows, orient, parse_graph, parse_spec, path, \
    random_planar, random_tree, read_graph, shortest_path_tree, sssp, star, subdivide, \
    tight_parents, to_scalar, write_graph


def to_nx(g):
    G = nx.DiGraph() if g.directed else nx.Graph()
    G.add_nodes_from(range(g.n))
    for u, v, w in g.edges:
        if G.has_edge(u, v):
            w = min(w, G[u][v]["weight"])
        G.add_edge(u, v, weight=w)
    return G


def nx_all_pairs(g):
    out = np.full((g.n, g.n), INF, dtype=np.int64)
    for s, row in nx.all_pairs_dijkstra_path_length(to_nx(g)):
        for t, d in row.items():
            out[s, t] = d
    return out


# ---- construction


def test_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1, 2, 3)])


def test_undirected_adjacency_is_symmetric():
    g = Graph(3, [(0, 1), (1, 2, 5)])
    assert [y for y, _, _ in g.out_adj[1]] == [0, 2]
    assert g.m == 2 and g.weighted
    assert g.neighbors(1) == [0, 2]


def test_induced_subgraph_keeps_only_inner_edges():
    g = grid(3, 3)
    sub, ids = g.induced([0, 1, 3, 4])
    assert sub.n == 4 and sub.m == 4
    assert list(ids) == [0, 1, 3, 4]


def test_equality_and_hash():
    assert path(4) == path(4)
    assert hash(path(4)) == hash(path(4))
    assert path(4) != cycle(4)


# ---- distances


def test_unreachable_sentinel_orders_after_ints():
    assert UNREACHABLE > 10 ** 30
    assert not UNREACHABLE < 5
    assert to_scalar(INF) is UNREACHABLE
    assert to_scalar(np.int64(3)) == 3


def test_sssp_directed_unreachable():
    g = Graph(3, [(0, 1), (1, 2)], directed=True)
    row = sssp(g, 2)
    assert row[0] is UNREACHABLE and row[2] == 0
    back = sssp(g, 2, reverse=True)
    assert back[0] == 2


def test_sssp_weighted_matches_networkx():
    g = Graph(5, [(0, 1, 4), (0, 2, 1), (2, 1, 2), (1, 3, 1), (3, 4, 3)])
    row = sssp(g, 0)
    expect = nx.single_source_dijkstra_path_length(to_nx(g), 0)
    assert [row[v] for v in range(5)] == [expect[v] for v in range(5)]


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 60), st.integers(0, 10_000), st.booleans())
def test_all_pairs_matches_networkx(n, seed, directed):
    g = random_planar(n, seed=seed, drop=0.4)
    if directed:
        g = orient(g, seed=seed)
    assert np.array_equal(all_pairs(g), nx_all_pairs(g))


def test_multi_source_rows_reverse():
    g = orient(random_planar(40, seed=3), seed=3)
    fwd = all_pairs(g)
    rev = multi_source_rows(g, [0, 5, 9], reverse=True)
    assert np.array_equal(rev, fwd[:, [0, 5, 9]].T)


def test_all_pairs_cap():
    with pytest.raises(SizeCapError):
        all_pairs(path(20), cap=10)


def test_spt_tie_break_prefers_smallest_tail():
    # 0 -> 1 -> 3 and 0 -> 2 -> 3 tie; tail 1 wins
    g = Graph(4, [(0, 2), (0, 1), (2, 3), (1, 3)], directed=True)
    assert shortest_path_tree(g, 0) == frozenset({0, 1, 3})
    assert tight_parents(g, 0)[3] == [(1, 3), (2, 2)]


def test_spt_parallel_edges_prefer_smaller_id():
    g = Graph(2, [(0, 1, 2), (0, 1, 2)], directed=True)
    assert shortest_path_tree(g, 0) == frozenset({0})


def test_connectivity_helpers():
    g = Graph(5, [(0, 1), (2, 3)])
    assert components(g) == [[0, 1], [2, 3], [4]]
    assert not is_connected(g)
    assert is_strongly_connected(cycle(5, directed=True))
    assert not is_strongly_connected(Graph(2, [(0, 1)], directed=True))


# ---- generators


def test_grid_and_small_generators():
    g = grid(4, 3)
    assert g.n == 12 and g.m == 17
    assert star(4).m == 4 and cycle(6).m == 6 and path(5).m == 4
    assert random_tree(30, seed=1).m == 29 and is_connected(random_tree(30, seed=1))


@pytest.mark.parametrize("n,drop", [(10, 0.0), (200, 0.0), (200, 0.5), (500, 1.0)])
def test_random_planar_is_planar_connected_deterministic(n, drop):
    g = random_planar(n, seed=11, drop=drop)
    assert is_connected(g)
    assert nx.check_planarity(to_nx(g))[0]
    assert g == random_planar(n, seed=11, drop=drop)
    if drop == 1.0:
        assert g.m == n - 1


def test_subdivide_preserves_distances():
    g = Graph(4, [(0, 1, 3), (1, 2, 1), (0, 3, 5), (3, 2, 1)], directed=True)
    h, first = subdivide(g)
    assert h.n == g.n + sum(w - 1 for _, _, w in g.edges)
    assert not h.weighted
    assert np.array_equal(all_pairs(h)[: g.n, : g.n], all_pairs(g))
    assert h.edges[first[0]][0] == 0


def test_parse_spec_forms():
    assert parse_spec("grid:8,8") == grid(8, 8)
    assert parse_spec("cycle:n=5,directed=1") == cycle(5, directed=True)
    assert parse_spec("random_planar:n=100,drop=0.2", 4) == random_planar(100, seed=4, drop=0.2)
    d = parse_spec("orient+random_planar:50", 2)
    assert d.directed and d == orient(random_planar(50, seed=2), seed=2)
    with pytest.raises(ValueError):
        parse_spec("nosuch:3")
    with pytest.raises(ValueError):
        parse_spec("grid:1,2,3,4")


def test_generate_dispatch():
    assert generate("grid", {"w": 2, "h": 2}) == grid(2, 2)
    assert generate("orient", {"graph": path(3)}, seed=1).directed
    with pytest.raises(ValueError):
        generate("bogus")


# ---- text format


def test_format_roundtrip(tmp_path):
    for g in [grid(3, 3), orient(random_planar(30, seed=1), seed=1),
              Graph(3, [(0, 1, 7), (1, 2, 2)], directed=True), Graph(0, [])]:
        p = tmp_path / "g.txt"
        write_graph(g, p)
        assert read_graph(p) == g
        assert parse_graph(format_graph(g)) == g


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("grph 3 0 0\n", 1),
    ("graph 3 0 0\n0 1\n0 5\n", 3),
    ("graph 3 0 0\n# c\n0 1 4\n", 3),
    ("graph 3 0 1\n0 1 0\n", 2),
    ("graph 3 0 0\n1 1\n", 2),
    ("graph 3 0 0\n0 x\n", 2),
])
def test_format_errors_carry_line_numbers(text, line):
    with pytest.raises(GraphFormatError, match=f"line {line}"):
        parse_graph(text)


def test_comments_and_blank_lines():
    g = parse_graph("# header next\ngraph 2 1 0\n\n0 1  # edge\n")
    assert g == Graph(2, [(0, 1)], directed=True)
