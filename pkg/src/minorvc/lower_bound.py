"""Weighted planar digraph whose shortest-path trees shatter ``r`` edges.

Layout. A path ``P`` carries the special edges ``e_j = (u_j -> v_j)``, with
sinks ``x_j`` fed by ``v_{j+1}`` and ``u_j`` so endpoints cannot reach each
other along ``P``. Anchor ``a_i`` (bit string ``s_i`` = binary of ``i``, most
significant bit first) owns two horizontal paths ``y_{i1..ir}`` and
``z_{i1..ir}`` of weight ``M - 2 A_i`` per edge, and vertical edges down to
anchor ``i-1``'s paths (or to ``v_j`` / ``u_j`` for ``i = 0``). A 1 bit makes
the y-side vertical expensive (``A_i``) and the z-side cheap (1), so the tree
of ``a_i`` reaches ``v_j`` through ``e_j``.

All weights are Python ints; ``A_i`` grows like ``4^i`` so ``r = 6`` already
needs ~130-bit values, which the pure-Python Dijkstra handles exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graph_core import Graph, SizeCapError, _dijkstra, shortest_path_tree, subdivide, \
    tight_parents

MAX_R = 12


@dataclass(frozen=True)
class EdgeRole:
    kind: str  # 'X', 'P', 'Q1', 'Q2', 'Vy', 'Vz'
    row: int = -1  # anchor index for Q/V edges
    col: int = -1  # 1-based column j


@dataclass
class Gadget:
    r: int
    graph: Graph
    X: list[int]  # edge ids e_1..e_r
    anchors: list[int]  # vertex ids a_0..a_{2^r-1}
    M: int
    A: list[int]
    roles: list[EdgeRole]
    labels: list[tuple]  # per vertex: ('u', j), ('y', i, j), ('a', i), ...
    growth: int = 4

    def bits(self, i: int) -> list[int]:
        """``s_i[1..r]``, most significant bit first."""
        return [(i >> (self.r - j)) & 1 for j in range(1, self.r + 1)]

    def expected(self, i: int) -> frozenset[int]:
        return frozenset(e for e, b in zip(self.X, self.bits(i)) if b)

    def counts(self) -> dict:
        return {"n": self.graph.n, "m": self.graph.m,
                "n_formula": expected_vertex_count(self.r),
                "m_formula": expected_edge_count(self.r)}

    def manifest(self) -> dict:
        return {"r": self.r, "X": self.X, "anchors": self.anchors, "M": str(self.M),
                "A": [str(a) for a in self.A], "growth": self.growth, **self.counts()}

    def manifest_json(self) -> str:
        # constants go out as strings: they overflow double precision for r >= 4
        return json.dumps(self.manifest(), indent=2)


def expected_vertex_count(r: int) -> int:
    """``2r`` endpoints + ``r-1`` sinks + ``2^r`` anchors with ``2r`` path vertices each."""
    return 3 * r - 1 + (1 << r) * (2 * r + 1)


def expected_edge_count(r: int) -> int:
    """``r`` X edges + ``2(r-1)`` sink edges + per anchor ``2r`` horizontal and ``2r`` vertical."""
    return 3 * r - 2 + (1 << r) * 4 * r


def growth_violations(A: list[int]) -> list[tuple[int, int]]:
    """Pairs ``(i, t)``, ``t < i``, where ``A_i >= 2 A_t + A_{i-1} + ... + A_0 + 1`` fails."""
    bad = []
    prefix = 0
    for i, a in enumerate(A):
        for t in range(i):
            if a < 2 * A[t] + prefix + 1:
                bad.append((i, t))
        prefix += a
    return bad


def check_growth(A: list[int]) -> bool:
    return not growth_violations(A)


def build_gadget(r: int, A0: int = 2, M: int | None = None, growth: int = 4) -> Gadget:
    """Construct the shattering gadget for ``r`` special edges.

    ``M`` defaults to ``10 * A_max``. An explicit ``M`` must keep every
    horizontal weight ``M - 2 A_i`` at least 1. ``growth`` is the ratio
    ``A_i / A_{i-1}`` (4 in the construction; other values exist only for
    experiments and controls).
    """
    if not 1 <= r <= MAX_R:
        raise ValueError(f"r must be in [1, {MAX_R}]")
    if A0 < 2:
        raise ValueError("A0 must be >= 2")
    if growth < 1:
        raise ValueError("growth must be >= 1")
    A = [A0 * growth ** i for i in range(1 << r)]
    if M is None:
        M = 10 * A[-1]
    if M - 2 * A[-1] < 1:
        raise ValueError(f"M={M} makes horizontal weights < 1; need M > {2 * A[-1]}")

    ids: dict[tuple, int] = {}
    labels: list[tuple] = []
    edges: list[tuple[int, int, int]] = []
    roles: list[EdgeRole] = []

    def vid(label):
        if label not in ids:
            ids[label] = len(labels)
            labels.append(label)
        return ids[label]

    def add(a, b, w, role):
        edges.append((vid(a), vid(b), w))
        roles.append(role)
        return len(edges) - 1

    X = [add(("u", j), ("v", j), 1, EdgeRole("X", col=j)) for j in range(1, r + 1)]
    for j in range(1, r):
        add(("v", j + 1), ("x", j), 1, EdgeRole("P", col=j))
        add(("u", j), ("x", j), 1, EdgeRole("P", col=j))

    anchors = []
    for i in range(1 << r):
        anchors.append(vid(("a", i)))

        def y(t, j):
            return ("a", t) if j == 0 else ("y", t, j)

        def z(t, j):
            return ("a", t) if j == 0 else ("z", t, j)

        h = M - 2 * A[i]
        for j in range(1, r + 1):
            add(y(i, j - 1), y(i, j), h, EdgeRole("Q1", i, j))
            add(z(i, j - 1), z(i, j), h, EdgeRole("Q2", i, j))
        for j in range(1, r + 1):
            bit = (i >> (r - j)) & 1
            ty = ("v", j) if i == 0 else y(i - 1, j)
            tz = ("u", j) if i == 0 else z(i - 1, j)
            add(y(i, j), ty, A[i] if bit else 1, EdgeRole("Vy", i, j))
            add(z(i, j), tz, 1 if bit else A[i], EdgeRole("Vz", i, j))
    g = Graph(len(labels), edges, directed=True)
    return Gadget(r, g, X, anchors, M, A, roles, labels, growth)


@dataclass
class ShatterReport:
    passed: bool
    failures: list = field(default_factory=list)  # {anchor, expected, got}
    ties: list = field(default_factory=list)  # (anchor, vertex) with several tight parents
    growth_ok: bool = True

    def to_dict(self) -> dict:
        return {"pass": self.passed, "failures": self.failures,
                "ties": [list(t) for t in self.ties], "growth_ok": self.growth_ok}


def _relevant_vertices(gd: Gadget) -> list[int]:
    g = gd.graph
    out = []
    for e in gd.X:
        u, v, _ = g.edges[e]
        out += [u, v]
    return out


def verify_shattering(gd: Gadget) -> ShatterReport:
    """Check ``T(a_i) & X == {e_j : s_i[j] = 1}`` for every anchor.

    Tie-freedom is checked at the endpoints of the X edges: each must have
    exactly one tight in-edge from every anchor, so the result does not hinge
    on the tie-break rule.
    """
    rep = ShatterReport(True, growth_ok=check_growth(gd.A))
    Xs = set(gd.X)
    relevant = _relevant_vertices(gd)
    for i, a in enumerate(gd.anchors):
        dist = _dijkstra(gd.graph, a)
        T = shortest_path_tree(gd.graph, a)
        got = T & Xs
        want = gd.expected(i)
        if got != want:
            rep.passed = False
            rep.failures.append({"anchor": i, "expected": sorted(want), "got": sorted(got)})
        parents = tight_parents(gd.graph, a, dist)
        for x in relevant:
            if len(parents[x]) > 1:
                rep.ties.append((i, x))
    if rep.ties:
        rep.passed = False
    return rep


def _tree_path(g: Graph, src: int, dst: int, dist) -> list[int] | None:
    """Edge ids of the tie-broken shortest path ``src -> dst``."""
    if dist[dst] is None:
        return None
    parents = tight_parents(g, src, dist)
    path = []
    x = dst
    while x != src:
        a, eid = parents[x][0]
        path.append(eid)
        x = a
    return path[::-1]


def claim_paths(gd: Gadget, side: str = "y") -> list[dict]:
    """Path-shape checks for every ``(i, j)``; returns the violations.

    ``side='y'``: the shortest ``a_i -> v_j`` path in ``G - e_j`` is ``j``
    edges of anchor ``i``'s y-path then ``i + 1`` y-side vertical edges.
    ``side='z'``: the shortest ``a_i -> u_j`` path in ``G`` is ``j`` edges of
    the z-path then ``i + 1`` z-side vertical edges.
    """
    if side not in ("y", "z"):
        raise ValueError("side must be 'y' or 'z'")
    g = gd.graph
    horiz, vert = ("Q1", "Vy") if side == "y" else ("Q2", "Vz")
    bad = []
    for j in range(1, gd.r + 1):
        e = gd.X[j - 1]
        if side == "y":
            h = Graph(g.n, [ed for k, ed in enumerate(g.edges) if k != e], directed=True)
            keep = [k for k in range(g.m) if k != e]
            target = g.edges[e][1]
        else:
            h, keep, target = g, list(range(g.m)), g.edges[e][0]
        for i, a in enumerate(gd.anchors):
            p = _tree_path(h, a, target, _dijkstra(h, a))
            shape = [gd.roles[keep[k]] for k in p] if p is not None else None
            want = [EdgeRole(horiz, i, c) for c in range(1, j + 1)] + \
                   [EdgeRole(vert, t, j) for t in range(i, -1, -1)]
            if shape != want:
                bad.append({"anchor": i, "j": j, "side": side,
                            "got": None if shape is None else [s.kind for s in shape]})
    return bad


def to_unweighted(gd: Gadget, cap: int = 1_000_000) -> Gadget:
    """Subdivide every edge into unit edges; X keeps its (weight-1) edges.

    Original vertex ids are unchanged, so anchors carry over. Raises
    ``SizeCapError`` if the subdivided graph would exceed ``cap`` vertices.
    """
    size = gd.graph.n + sum(w - 1 for _, _, w in gd.graph.edges)
    if size > cap:
        raise SizeCapError(f"subdivided gadget has {size} vertices > cap {cap}")
    h, first = subdivide(gd.graph)
    roles = [EdgeRole("S")] * h.m
    for k, role in enumerate(gd.roles):
        roles[first[k]] = role
    labels = gd.labels + [("s", k) for k in range(gd.graph.n, h.n)]
    return Gadget(gd.r, h, [first[e] for e in gd.X], list(gd.anchors), gd.M, gd.A, roles,
                  labels, gd.growth)


def is_planar(gd: Gadget) -> bool:
    """Planarity of the underlying undirected graph (needs networkx)."""
    import networkx as nx

    G = nx.Graph()
    G.add_nodes_from(range(gd.graph.n))
    G.add_edges_from((u, v) for u, v, _ in gd.graph.edges)
    return nx.check_planarity(G)[0]
