"""Graph container, exact shortest paths, generators and the edge-list format.

Everything else in the package is checked against the brute-force routines
here (``sssp``, ``all_pairs``), so they are kept deliberately simple.

Distances live in two encodings:

* scalar API (``DistanceRow[v]``, oracle queries) returns ``int`` or the
  ``UNREACHABLE`` singleton;
* array API (rows, matrices) stores unreachable entries as ``INF``, a large
  int64 code chosen so that ``INF + INF`` does not overflow and so that it
  compares above every real distance.
"""

from __future__ import annotations

import functools
import heapq
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path as _csgraph_shortest_path


@functools.total_ordering
class _Unreachable:
    """Distance to a vertex that cannot be reached. Compares above any int."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNREACHABLE"

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("UNREACHABLE")

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()

#: array encoding of UNREACHABLE
INF = np.int64(1 << 40)


def to_scalar(d):
    """Convert an array distance to the scalar API."""
    d = int(d)
    return UNREACHABLE if d >= INF else d


class GraphFormatError(ValueError):
    pass


class SizeCapError(ValueError):
    pass


class Graph:
    """Immutable graph on vertices ``0..n-1``.

    Undirected graphs store each edge once; ``out_adj`` and ``in_adj`` expose it
    from both endpoints. Adjacency entries are ``(neighbor, weight, edge_id)``.
    """

    def __init__(self, n: int, edges: Iterable[Sequence[int]], directed: bool = False):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        canon = []
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1
            elif len(e) == 3:
                u, v, w = e
            else:
                raise ValueError(f"bad edge {e!r}")
            u, v, w = int(u), int(v), int(w)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if w < 1:
                raise ValueError(f"edge ({u}, {v}) has weight {w} < 1")
            canon.append((u, v, w))
        self.n = n
        self.directed = bool(directed)
        self.edges: tuple[tuple[int, int, int], ...] = tuple(canon)
        out_adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        in_adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for eid, (u, v, w) in enumerate(self.edges):
            out_adj[u].append((v, w, eid))
            in_adj[v].append((u, w, eid))
            if not self.directed:
                out_adj[v].append((u, w, eid))
                in_adj[u].append((v, w, eid))
        self.out_adj = tuple(tuple(a) for a in out_adj)
        self.in_adj = tuple(tuple(a) for a in in_adj)
        self._csr = {}

    def __repr__(self):
        kind = "digraph" if self.directed else "graph"
        return f"<{kind} n={self.n} m={self.m}{' weighted' if self.weighted else ''}>"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.directed, self.canonical_edges()) == (
            other.n, other.directed, other.canonical_edges())

    def __hash__(self):
        return hash((self.n, self.directed, self.canonical_edges()))

    @property
    def m(self) -> int:
        return len(self.edges)

    @functools.cached_property
    def weighted(self) -> bool:
        return any(w != 1 for _, _, w in self.edges)

    def canonical_edges(self):
        if self.directed:
            return tuple(sorted(self.edges))
        return tuple(sorted((min(u, v), max(u, v), w) for u, v, w in self.edges))

    def neighbors(self, u: int) -> list[int]:
        """Neighbors of ``u`` in the underlying undirected graph."""
        seen = {v for v, _, _ in self.out_adj[u]}
        seen.update(v for v, _, _ in self.in_adj[u])
        return sorted(seen)

    def csr(self, reverse: bool = False) -> sp.csr_matrix:
        """Sparse adjacency with the minimum weight kept for parallel edges."""
        key = bool(reverse) and self.directed
        if key not in self._csr:
            best: dict[tuple[int, int], int] = {}
            for u, v, w in self.edges:
                if key:
                    u, v = v, u
                for a, b in ((u, v), (v, u)) if not self.directed else ((u, v),):
                    if best.get((a, b), w + 1) > w:
                        best[(a, b)] = w
            if best:
                rows, cols = zip(*best)
                data = np.fromiter(best.values(), dtype=np.float64, count=len(best))
            else:
                rows, cols, data = (), (), np.zeros(0)
            self._csr[key] = sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        return self._csr[key]

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", np.ndarray]:
        """Induced subgraph relabelled to ``0..k-1`` plus the local->global map."""
        vs = np.asarray(sorted(vertices), dtype=np.int64)
        local = {int(v): i for i, v in enumerate(vs)}
        sub = [(local[u], local[v], w) for u, v, w in self.edges if u in local and v in local]
        return Graph(len(vs), sub, self.directed), vs

    def underlying(self) -> "Graph":
        if not self.directed:
            return self
        seen = set()
        edges = []
        for u, v, w in self.edges:
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                edges.append((key[0], key[1], w))
        return Graph(self.n, edges, directed=False)


@dataclass(frozen=True)
class DistanceRow:
    source: int
    dist: np.ndarray

    def __getitem__(self, v):
        return to_scalar(self.dist[v])

    def __len__(self):
        return len(self.dist)

    def reachable(self) -> np.ndarray:
        return self.dist < INF


def sssp(g: Graph, s: int, reverse: bool = False) -> DistanceRow:
    """Exact single-source distances; ``reverse`` gives ``d(. -> s)`` in a digraph.

    BFS for unit weights, Dijkstra otherwise. Pure Python so that arbitrarily
    large integer weights (the lower-bound gadget) stay exact; use
    ``multi_source_rows`` for bulk work on unit-weight graphs.
    """
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range")
    dist = _dijkstra(g, s, reverse)
    arr = np.full(g.n, INF, dtype=np.int64)
    for v, d in enumerate(dist):
        if d is not None:
            if d >= INF:
                raise OverflowError("distance exceeds the int64 array encoding; use _dijkstra")
            arr[v] = d
    return DistanceRow(s, arr)


def _dijkstra(g: Graph, s: int, reverse: bool = False) -> list:
    """Distances as Python ints (``None`` = unreachable)."""
    adj = g.in_adj if reverse else g.out_adj
    dist: list = [None] * g.n
    dist[s] = 0
    if not g.weighted:
        queue = deque([s])
        while queue:
            x = queue.popleft()
            dx = dist[x] + 1
            for y, _, _ in adj[x]:
                if dist[y] is None:
                    dist[y] = dx
                    queue.append(y)
        return dist
    heap = [(0, s)]
    done = [False] * g.n
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w, _ in adj[x]:
            nd = d + w
            if dist[y] is None or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


def multi_source_rows(g: Graph, sources: Sequence[int], reverse: bool = False) -> np.ndarray:
    """Distance rows for many sources at once (``len(sources) x n`` int64, INF-coded).

    Row ``i`` holds ``d(sources[i] -> .)``, or ``d(. -> sources[i])`` when
    ``reverse`` is set on a digraph. Backed by scipy's csgraph BFS/Dijkstra.
    """
    sources = np.asarray(sources, dtype=np.int64)
    if len(sources) == 0:
        return np.zeros((0, g.n), dtype=np.int64)
    if g.weighted and max(w for _, _, w in g.edges) * g.n >= 2**52:
        raise OverflowError("weights too large for float64 csgraph routines")
    rows = _csgraph_shortest_path(g.csr(reverse=reverse), method="D", directed=g.directed,
                                  unweighted=not g.weighted, indices=sources)
    rows = np.atleast_2d(rows)
    out = np.full(rows.shape, INF, dtype=np.int64)
    finite = np.isfinite(rows)
    out[finite] = np.rint(rows[finite]).astype(np.int64)
    return out


def all_pairs(g: Graph, cap: int = 5000) -> np.ndarray:
    """Full ``n x n`` distance matrix; the brute-force reference for tests."""
    if g.n > cap:
        raise SizeCapError(f"all_pairs refused: n={g.n} exceeds cap {cap} "
                           f"({g.n * g.n * 8 / 2**20:.1f} MiB matrix)")
    return multi_source_rows(g, np.arange(g.n))


def shortest_path_tree(g: Graph, v: int) -> frozenset[int]:
    """Edge ids of the shortest-path tree rooted at ``v``.

    Every reachable vertex other than ``v`` keeps one parent edge: among the
    tight in-edges, the one with the smallest tail id, then smallest edge id.
    """
    dist = _dijkstra(g, v)
    tree = set()
    for x in range(g.n):
        if x == v or dist[x] is None:
            continue
        best = None
        for a, w, eid in g.in_adj[x]:
            if dist[a] is not None and dist[a] + w == dist[x]:
                if best is None or (a, eid) < best:
                    best = (a, eid)
        tree.add(best[1])
    return frozenset(tree)


def tight_parents(g: Graph, v: int, dist: list | None = None) -> list[list[tuple[int, int]]]:
    """All ``(tail, edge_id)`` pairs realizing each vertex's distance from ``v``."""
    if dist is None:
        dist = _dijkstra(g, v)
    out = []
    for x in range(g.n):
        cands = []
        if x != v and dist[x] is not None:
            cands = sorted((a, eid) for a, w, eid in g.in_adj[x]
                           if dist[a] is not None and dist[a] + w == dist[x])
        out.append(cands)
    return out


def is_connected(g: Graph) -> bool:
    """Weak connectivity (connectivity of the underlying undirected graph)."""
    return len(components(g)) <= 1


def components(g: Graph) -> list[list[int]]:
    """Weakly connected components, each sorted, ordered by smallest vertex."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for adj in (g.out_adj[x], g.in_adj[x]):
                for y, _, _ in adj:
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
        comps.append(sorted(comp))
    return comps


def is_strongly_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    fwd = _dijkstra(g, 0)
    bwd = _dijkstra(g, 0, reverse=True)
    return all(d is not None for d in fwd) and all(d is not None for d in bwd)


# --------------------------------------------------------------------------
# generators


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int, directed: bool = False) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], directed=directed)


def star(leaves: int) -> Graph:
    if leaves < 1:
        raise ValueError("star needs at least one leaf")
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def grid(w: int, h: int) -> Graph:
    if w < 1 or h < 1:
        raise ValueError("grid dimensions must be positive")
    edges = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            if x + 1 < w:
                edges.append((v, v + 1))
            if y + 1 < h:
                edges.append((v, v + w))
    return Graph(w * h, edges)


def random_tree(n: int, seed=None) -> Graph:
    if n < 1:
        raise ValueError("tree needs n >= 1")
    rng = np.random.default_rng(seed)
    return Graph(n, [(int(rng.integers(0, v)), v) for v in range(1, n)])


def random_planar(n: int, seed=None, drop: float = 0.0) -> Graph:
    """Triangulation of ``n`` random points, optionally thinned.

    ``drop`` removes that fraction of the non-tree edges (a random spanning
    tree is always kept), which stretches distances while staying planar.
    """
    if n < 1:
        raise ValueError("random_planar needs n >= 1")
    if not 0.0 <= drop <= 1.0:
        raise ValueError("drop must be in [0, 1]")
    if n <= 3:
        return path(n) if n < 3 else cycle(3)
    from scipy.spatial import Delaunay

    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    es = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (a, c)):
            es.add((min(int(u), int(v)), max(int(u), int(v))))
    edges = sorted(es)
    if drop > 0:
        order = rng.permutation(len(edges))
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        tree, rest = [], []
        for k in order:
            u, v = edges[k]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                tree.append(edges[k])
            else:
                rest.append(edges[k])
        keep = int(round(len(rest) * (1.0 - drop)))
        edges = sorted(tree + rest[:keep])
    return Graph(n, edges)


def orient(g: Graph, seed=None, both: float = 0.3) -> Graph:
    """Random digraph on ``g``'s edges: each edge gets one direction, or both
    with probability ``both``."""
    if g.directed:
        raise ValueError("orient expects an undirected graph")
    rng = np.random.default_rng(seed)
    edges = []
    for u, v, w in g.edges:
        x = rng.random()
        if x < both:
            edges += [(u, v, w), (v, u, w)]
        elif x < both + (1 - both) / 2:
            edges.append((u, v, w))
        else:
            edges.append((v, u, w))
    return Graph(g.n, edges, directed=True)


def subdivide(g: Graph) -> tuple[Graph, list[int]]:
    """Replace each weight-``w`` edge by a path of ``w`` unit edges.

    Original vertices keep their ids; new vertices are appended. Returns the
    unit graph and, per original edge id, the id of its first unit edge.
    """
    n = g.n
    edges = []
    first = []
    for u, v, w in g.edges:
        first.append(len(edges))
        prev = u
        for _ in range(w - 1):
            edges.append((prev, n, 1))
            prev = n
            n += 1
        edges.append((prev, v, 1))
    return Graph(n, edges, directed=g.directed), first


GENERATORS = {
    "path": path,
    "cycle": cycle,
    "star": star,
    "grid": grid,
    "tree": random_tree,
    "random_planar": random_planar,
}


def generate(kind: str, params: dict | None = None, seed=None) -> Graph:
    """Dispatch by name. ``orient`` and ``subdivide`` take a base graph in
    ``params['graph']``; seeded kinds take ``seed``."""
    params = dict(params or {})
    if kind == "orient":
        return orient(params.pop("graph"), seed=seed, **params)
    if kind == "subdivide":
        return subdivide(params.pop("graph"))[0]
    if kind not in GENERATORS:
        raise ValueError(f"unknown graph kind {kind!r}; choose from "
                         f"{sorted(GENERATORS) + ['orient', 'subdivide']}")
    if kind in ("tree", "random_planar"):
        params["seed"] = seed
    try:
        return GENERATORS[kind](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind}: {exc}") from None


def parse_spec(spec: str, seed=None) -> Graph:
    """Parse ``kind:a,b`` / ``kind:key=val`` shorthands, e.g. ``grid:8,8``,
    ``random_planar:n=400,drop=0.2``, ``orient+random_planar:300``."""
    oriented = spec.startswith("orient+")
    if oriented:
        spec = spec[len("orient+"):]
    kind, _, rest = spec.partition(":")
    args, kwargs = [], {}
    for tok in filter(None, rest.split(",")):
        if "=" in tok:
            k, v = tok.split("=", 1)
            kwargs[k] = float(v) if "." in v else int(v)
        else:
            args.append(int(tok))
    fn = GENERATORS.get(kind)
    if fn is None:
        raise ValueError(f"unknown graph kind {kind!r}")
    if kind in ("tree", "random_planar"):
        kwargs["seed"] = seed
    try:
        g = fn(*args, **kwargs)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind}: {exc}") from None
    if oriented:
        g = orient(g, seed=seed)
    return g


# --------------------------------------------------------------------------
# text format


def format_graph(g: Graph) -> str:
    """``graph <n> <directed> <weighted>`` header, then ``u v [w]`` per edge."""
    weighted = g.weighted
    lines = [f"graph {g.n} {int(g.directed)} {int(weighted)}"]
    for u, v, w in g.edges:
        lines.append(f"{u} {v} {w}" if weighted else f"{u} {v}")
    return "\n".join(lines) + "\n"


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(format_graph(g))


def read_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def parse_graph(text: str) -> Graph:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if header is None:
            if len(tok) != 4 or tok[0] != "graph":
                raise GraphFormatError(f"line {lineno}: expected 'graph <n> <directed> <weighted>'")
            try:
                n, directed, weighted = (int(t) for t in tok[1:])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer header field") from None
            if directed not in (0, 1) or weighted not in (0, 1) or n < 0:
                raise GraphFormatError(f"line {lineno}: invalid header values")
            header = (n, directed, weighted)
            continue
        want = 3 if header[2] else 2
        if len(tok) not in (2, 3) or (len(tok) == 3 and not header[2]):
            raise GraphFormatError(f"line {lineno}: expected {want} fields, got {len(tok)}")
        try:
            e = tuple(int(t) for t in tok)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer field in {raw.strip()!r}") from None
        if not (0 <= e[0] < header[0] and 0 <= e[1] < header[0]):
            raise GraphFormatError(f"line {lineno}: vertex out of range")
        if e[0] == e[1] or (len(e) == 3 and e[2] < 1):
            raise GraphFormatError(f"line {lineno}: self-loop or non-positive weight")
        edges.append(e)
    if header is None:
        raise GraphFormatError("line 1: missing header")
    return Graph(header[0], edges, directed=bool(header[1]))
