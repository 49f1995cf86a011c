import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minorvc.graph_core import Graph, cycle, grid, orient, path, random_planar, star
from minorvc.rdivision import build_r_division, check_division, division_from_parts, \
    division_quality, read_division, write_division


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 150), st.integers(0, 10_000), st.integers(1, 80), st.booleans())
def test_invariants_hold(n, seed, r, directed):
    g = random_planar(n, seed=seed, drop=0.3)
    if directed:
        g = orient(g, seed=seed)
    div = build_r_division(g, r)
    check_division(g, div)
    assert div.r == min(r, n)


@pytest.mark.parametrize("g", [grid(10, 10), cycle(9), path(7), star(6), random_planar(300, seed=5)])
@pytest.mark.parametrize("r", [1, 2, 5, 17, 1000])
def test_structured_graphs(g, r):
    div = build_r_division(g, r)
    check_division(g, div)
    q = division_quality(div)
    assert q["max_cluster"] <= div.r
    assert q["boundary_sum"] == q["boundary_vertices"]  # vertex partition


def test_r_one_makes_singletons():
    g = grid(3, 3)
    div = build_r_division(g, 1)
    assert len(div.clusters) == 9
    assert all(c.boundary == c.vertices for c in div.clusters)


def test_whole_graph_cluster_has_no_boundary():
    div = build_r_division(grid(4, 4), 16)
    assert len(div.clusters) == 1 and div.clusters[0].boundary == ()
    assert len(div.boundary_vertices) == 0


def test_disconnected_graph_divided_per_component():
    g = Graph(7, [(0, 1), (1, 2), (3, 4), (5, 6)])
    div = build_r_division(g, 3)
    check_division(g, div)
    assert sorted(c.vertices for c in div.clusters) == [(0, 1, 2), (3, 4), (5, 6)]


def test_deterministic():
    g = random_planar(400, seed=9)
    a, b = build_r_division(g, 30), build_r_division(g, 30)
    assert a.clusters == b.clusters


def test_local_index():
    g = grid(5, 5)
    div = build_r_division(g, 6)
    loc = div.local_index()
    for c in div.clusters:
        assert [loc[v] for v in c.vertices] == list(range(c.size))


def test_check_division_catches_violations():
    g = path(4)
    div = division_from_parts(g, [[0, 1], [2, 3]])
    assert [c.boundary for c in div.clusters] == [(1,), (2,)]
    with pytest.raises(AssertionError):
        division_from_parts(g, [[0, 2], [1, 3]])  # disconnected clusters
    with pytest.raises(AssertionError):
        division_from_parts(g, [[0, 1], [1, 2, 3]])  # overlap
    with pytest.raises(AssertionError):
        division_from_parts(g, [[0, 1]])  # not a cover


def test_rejects_bad_r():
    with pytest.raises(ValueError):
        build_r_division(path(3), 0)


def test_file_roundtrip(tmp_path):
    g = random_planar(120, seed=2)
    div = build_r_division(g, 15)
    write_division(div, tmp_path / "d.txt")
    back = read_division(tmp_path / "d.txt")
    assert back.clusters == div.clusters and back.r == div.r
    assert np.array_equal(back.owner, div.owner)
    check_division(g, back)


def test_boundary_shrinks_with_larger_clusters():
    g = random_planar(2000, seed=1)
    sums = [division_quality(build_r_division(g, r))["boundary_sum"] for r in (10, 40, 160)]
    assert sums[0] > sums[1] > sums[2]
