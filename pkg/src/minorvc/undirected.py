"""Pattern-based algorithms for unweighted undirected graphs.

All of them share one per-cluster preprocessing step:

1. boundary rows ``D(B, V)`` by BFS from every boundary vertex;
2. the pattern of every vertex against the cluster's boundary sequence,
   deduplicated in a ``PatternTable``;
3. ``d(p, v)`` for every distinct pattern ``p`` and cluster vertex ``v``;
4. exact in-graph distances between cluster vertices, taking the smaller of
   the in-cluster BFS distance and the route through the boundary.

For ``u`` outside the cluster, ``d(u, v) = d(u, s_0) + d(p_u, v)``.
"""

from __future__ import annotations

import math
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph_core import INF, Graph, is_connected, multi_source_rows
from .patterns import BoundaryRows, PatternTable, pattern_count_cap, pattern_distance_matrix
from .rdivision import Cluster, RDivision, build_r_division

FORMAT_VERSION = 1
_MAGIC = 0x4D5643_55  # "MVCU"


R_RULES = {
    "undirected": lambda h: 2 / (3 * h - 1),
    "directed_oracle": lambda h: 1 / (h - 2),
    "directed_ecc": lambda h: 2 / (3 * h * h + 6),
    "sqrt": lambda h: 0.5,
}


def r_preset(n: int, rule: str = "undirected", h: int = 5) -> int:
    """Cluster size rules: ``undirected`` n^(2/(3h-1)), ``directed_oracle``
    n^(1/(h-2)), ``directed_ecc`` n^(2/(3h^2+6)), ``sqrt`` n^(1/2)."""
    if rule not in R_RULES:
        raise ValueError(f"unknown r rule {rule!r}")
    if h < 3:
        raise ValueError("h must be >= 3")
    return max(1, min(n, round(n ** R_RULES[rule](h)))) if n else 1


def _require_unit_undirected(g: Graph):
    if g.directed:
        raise ValueError("expected an undirected graph")
    if g.weighted:
        raise ValueError("pattern algorithms assume unit weights")
    if not is_connected(g):
        raise ValueError("graph is disconnected; run per component "
                         "(graph_core.components + Graph.induced)")


@dataclass
class ClusterTables:
    cluster: Cluster
    vertices: np.ndarray
    d0: np.ndarray  # d(u, s_0) for every u (zeros if no boundary)
    table: PatternTable
    pid: np.ndarray  # pattern id of every u
    pd: np.ndarray  # d(p, v): patterns x cluster vertices
    intra: np.ndarray  # global distances between cluster vertices

    @property
    def patterns(self) -> np.ndarray:
        return self.table.matrix()


def cluster_tables(g: Graph, c: Cluster, rows: BoundaryRows) -> ClusterTables:
    vs = np.asarray(c.vertices, dtype=np.int64)
    sub, _ = g.induced(c.vertices)
    d_in = multi_source_rows(sub, np.arange(len(vs)))
    if not c.boundary_sequence:
        table, pid = PatternTable.from_rows(np.zeros((g.n, 0), dtype=np.int64))
        pd = np.zeros((len(table), len(vs)), dtype=np.int64)
        return ClusterTables(c, vs, np.zeros(g.n, dtype=np.int64), table, pid, pd, d_in)
    D = rows.of(c.boundary_sequence)
    table, pid = PatternTable.from_rows((D - D[0]).T)
    pd = pattern_distance_matrix(table.matrix(), D[:, vs])
    route = D[0, vs][:, None] + pd[pid[vs]]
    intra = np.minimum(d_in, route)
    return ClusterTables(c, vs, D[0].copy(), table, pid, pd, intra)


def _prepare(g: Graph, r, h, division):
    _require_unit_undirected(g)
    if division is None:
        division = build_r_division(g, r if r is not None else r_preset(g.n, "undirected", h))
    rows = BoundaryRows.compute(g, division)
    return division, rows


@dataclass
class EccResult:
    ecc: np.ndarray
    diameter: int
    pattern_counts: list = field(default_factory=list)


def boundary_distances(g: Graph, div: RDivision) -> BoundaryRows:
    """One BFS row per boundary vertex of the division."""
    _require_unit_undirected(g)
    return BoundaryRows.compute(g, div)


def eccentricities(g: Graph, r: int | None = None, h: int = 5,
                   division: RDivision | None = None) -> EccResult:
    """All eccentricities and the diameter.

    Per cluster: the farthest-vertex distance of each distinct pattern, then
    ``d(u, s_0) + far[p_u]`` for outside vertices and the exact in-graph
    cluster distances for inside ones.
    """
    div, rows = _prepare(g, r, h, division)
    ecc = np.zeros(g.n, dtype=np.int64)
    counts = []
    for c in div.clusters:
        t = cluster_tables(g, c, rows)
        counts.append(len(t.table))
        contrib = t.d0 + t.pd.max(axis=1)[t.pid]
        contrib[t.vertices] = t.intra.max(axis=1)
        if not c.boundary_sequence:
            contrib[np.setdiff1d(np.arange(g.n), t.vertices)] = 0
        np.maximum(ecc, contrib, out=ecc)
    return EccResult(ecc, int(ecc.max(initial=0)), counts)


def wiener_index(g: Graph, r: int | None = None, h: int = 5,
                 division: RDivision | None = None) -> int:
    """Half the sum of all ordered pairwise distances.

    ``W(V,V) = W(B,V) + sum_R [W(R_int, V(R)) + W(R_int, V - V(R))]`` with
    ``R_int`` the cluster's non-boundary vertices; the last term uses
    per-pattern distance sums.
    """
    div, rows = _prepare(g, r, h, division)
    total = int(rows.rows.sum())
    for c in div.clusters:
        t = cluster_tables(g, c, rows)
        inner = np.isin(t.vertices, c.boundary, invert=True)
        total += int(t.intra[inner].sum())
        if not c.boundary_sequence:
            continue
        outside = np.ones(g.n, dtype=bool)
        outside[t.vertices] = False
        sums = t.pd[:, inner].sum(axis=1)
        total += int(inner.sum()) * int(t.d0[outside].sum()) + int(sums[t.pid[outside]].sum())
    assert total % 2 == 0
    return total // 2


class UndirectedOracle:
    """Exact distance oracle with O(1) table lookups per query."""

    def __init__(self, n, r, h, owner, local, sizes, boundary, patterns, pid, d0, pd, intra):
        self.n, self.r, self.h = int(n), int(r), int(h)
        self.owner = owner
        self.local = local
        self.sizes = sizes
        self.boundary = boundary  # list of arrays
        self.patterns = patterns  # list of (m x b) arrays
        self.pid = pid  # C x n
        self.d0 = d0  # C x n
        self.pd = pd  # list of (m x size) arrays
        self.intra = intra  # list of (size x size) arrays
        self._flatten()

    def _flatten(self):
        self._pd_off = np.cumsum([0] + [a.size for a in self.pd])[:-1]
        self._in_off = np.cumsum([0] + [a.size for a in self.intra])[:-1]
        self._pd_flat = np.concatenate([a.ravel() for a in self.pd]) if self.pd else np.zeros(0)
        self._in_flat = np.concatenate([a.ravel() for a in self.intra]) if self.intra else np.zeros(0)

    @classmethod
    def build(cls, g: Graph, r: int | None = None, h: int = 5,
              division: RDivision | None = None) -> "UndirectedOracle":
        div, rows = _prepare(g, r, h, division)
        C = len(div.clusters)
        pid = np.zeros((C, g.n), dtype=np.int32)
        d0 = np.zeros((C, g.n), dtype=np.int32)
        pats, pds, intras, bnds = [], [], [], []
        for c in div.clusters:
            t = cluster_tables(g, c, rows)
            pid[c.id] = t.pid
            d0[c.id] = t.d0
            pats.append(t.patterns.astype(np.int32))
            pds.append(t.pd.astype(np.int32))
            intras.append(t.intra.astype(np.int32))
            bnds.append(np.asarray(c.boundary_sequence, dtype=np.int32))
        sizes = np.array([c.size for c in div.clusters], dtype=np.int64)
        return cls(g.n, div.r, h, div.owner.copy(), div.local_index(), sizes, bnds, pats,
                   pid, d0, pds, intras)

    def query(self, u: int, v: int) -> int:
        c = self.owner[v]
        w = self.sizes[c]
        if self.owner[u] == c:
            return int(self._in_flat[self._in_off[c] + self.local[u] * w + self.local[v]])
        return int(self.d0[c, u] + self._pd_flat[self._pd_off[c] + self.pid[c, u] * w + self.local[v]])

    def query_many(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        c = self.owner[vs]
        w = self.sizes[c]
        same = self.owner[us] == c
        out = np.empty(len(us), dtype=np.int64)
        lu, lv = self.local[us], self.local[vs]
        out[same] = self._in_flat[self._in_off[c[same]] + lu[same] * w[same] + lv[same]]
        x = ~same
        cx, ux = c[x], us[x]
        out[x] = self.d0[cx, ux] + self._pd_flat[self._pd_off[cx] + self.pid[cx, ux].astype(np.int64) * w[x] + lv[x]]
        return out

    def distance_matrix(self) -> np.ndarray:
        u, v = np.divmod(np.arange(self.n * self.n), self.n)
        return self.query_many(u, v).reshape(self.n, self.n)

    def pattern_counts(self) -> list[int]:
        return [len(p) for p in self.patterns]

    def pattern_caps(self, k: int = 4) -> list[int]:
        return [pattern_count_cap(len(b), int(s), k) for b, s in zip(self.boundary, self.sizes)]

    def nbytes(self) -> int:
        arrays = [self.owner, self.local, self.sizes, self.pid, self.d0, self._pd_flat, self._in_flat]
        arrays += self.patterns + self.boundary
        return int(sum(a.nbytes for a in arrays))

    # ---- serialization

    def save(self, path) -> None:
        sections = {
            "header": np.array([_MAGIC, FORMAT_VERSION, self.n, self.r, self.h], dtype=np.int64),
            "owner": self.owner, "local": self.local, "sizes": self.sizes,
            "pid": self.pid, "d0": self.d0,
        }
        sections.update(_pack("boundary", self.boundary))
        sections.update(_pack("patterns", self.patterns))
        sections.update(_pack("pd", self.pd))
        sections.update(_pack("intra", self.intra))
        with open(path, "wb") as fh:
            np.savez(fh, **sections)

    @classmethod
    def load(cls, path) -> "UndirectedOracle":
        with np.load(path, allow_pickle=False) as z:
            header = z["header"]
            _check_header(header, _MAGIC, "undirected")
            n, r, h = (int(x) for x in header[2:5])
            return cls(n, r, h, z["owner"], z["local"], z["sizes"], _unpack(z, "boundary"),
                       _unpack(z, "patterns"), z["pid"], z["d0"], _unpack(z, "pd"),
                       _unpack(z, "intra"))


class OracleFormatError(ValueError):
    pass


def _check_header(header, magic, what):
    if len(header) < 2 or int(header[0]) != magic:
        raise OracleFormatError(f"not a {what} oracle file")
    if int(header[1]) != FORMAT_VERSION:
        raise OracleFormatError(f"{what} oracle format version {int(header[1])} "
                                f"!= supported {FORMAT_VERSION}")


def _pack(name, arrays) -> dict:
    """Ragged list of arrays -> flat data + shape table."""
    shapes = np.array([a.shape for a in arrays], dtype=np.int64).reshape(len(arrays), -1)
    flat = np.concatenate([a.ravel() for a in arrays]) if arrays else np.zeros(0, dtype=np.int32)
    return {f"{name}__data": flat, f"{name}__shapes": shapes}


def _unpack(z, name) -> list:
    flat, shapes = z[f"{name}__data"], z[f"{name}__shapes"]
    out, pos = [], 0
    for shp in shapes:
        k = int(np.prod(shp)) if len(shp) else 0
        out.append(flat[pos:pos + k].reshape(tuple(int(s) for s in shp)))
        pos += k
    return out


def build_oracle(g: Graph, r: int | None = None, h: int = 5,
                 division: RDivision | None = None) -> UndirectedOracle:
    return UndirectedOracle.build(g, r, h, division)


def query(o: UndirectedOracle, u: int, v: int) -> int:
    return o.query(u, v)


def load_oracle(path):
    """Load either oracle kind, dispatching on the file's header."""
    from .directed import DirectedOracle, _MAGIC as _DMAGIC

    try:
        z = np.load(path, allow_pickle=False)
    except (ValueError, zipfile.BadZipFile) as exc:
        raise OracleFormatError(f"{path}: not an oracle file") from exc
    if not isinstance(z, np.lib.npyio.NpzFile):
        raise OracleFormatError(f"{path}: not an oracle file")
    with z:
        if "header" not in z.files:
            raise OracleFormatError(f"{path}: missing header section")
        magic = int(z["header"][0])
    if magic == _MAGIC:
        return UndirectedOracle.load(path)
    if magic == _DMAGIC:
        return DirectedOracle.load(path)
    raise OracleFormatError("unknown oracle kind")


@dataclass
class TupleCompression:
    S: tuple
    tuples: np.ndarray  # distinct tuples x |S|
    tuple_id: np.ndarray  # per vertex
    diameter: int
    cap: int  # |S|^(h-1) * D^h

    def tuple_of(self, v: int) -> tuple:
        return tuple(int(x) for x in self.tuples[self.tuple_id[v]])


def distance_tuples(g: Graph, S, h: int = 5, diameter: int | None = None) -> TupleCompression:
    """Deduplicate the vectors ``<d(v, s_0), ..., d(v, s_{k-1})>``."""
    _require_unit_undirected(g)
    S = tuple(int(s) for s in S)
    rows = multi_source_rows(g, S)
    table, ids = PatternTable.from_rows(rows.T)
    if diameter is None:
        diameter = eccentricities(g, r=r_preset(g.n, "sqrt")).diameter
    cap = len(S) ** (h - 1) * diameter ** h
    return TupleCompression(S, table.matrix(), ids, diameter, cap)
