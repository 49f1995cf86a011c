"""Distance patterns of vertices with respect to a cluster's boundary.

A pattern records, for a vertex ``u``, the differences
``d(u, s_i) - d(u, s_0)`` against the ordered boundary ``s_0, s_1, ...`` of a
cluster. Undirected patterns are plain integer vectors. Directed ("infinite")
patterns clip differences outside ``[-(r-1), r-1]`` (``r`` = cluster size) to
the sentinels ``NEG_INF`` / ``POS_INF``.

Boundary distances are passed around as ``BoundaryRows``: one INF-coded
distance row per boundary vertex of the division.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph_core import INF, UNREACHABLE, Graph, multi_source_rows
from .rdivision import Cluster, RDivision

#: reserved pattern codes, outside any cluster's finite range
NEG_INF = -(1 << 30)
POS_INF = 1 << 30


class _Undefined:
    def __repr__(self):
        return "UNDEFINED"

    def __reduce__(self):
        return (_undefined, ())


def _undefined():
    return UNDEFINED


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class BoundaryRows:
    """Distance rows keyed by boundary vertex.

    ``rows[k, v]`` is ``d(vertices[k] -> v)`` for forward rows and
    ``d(v -> vertices[k])`` for reverse rows.
    """

    vertices: np.ndarray
    rows: np.ndarray
    reverse: bool = False

    @classmethod
    def compute(cls, g: Graph, div: RDivision, reverse: bool = False) -> "BoundaryRows":
        b = div.boundary_vertices
        return cls(b, multi_source_rows(g, b, reverse=reverse), reverse and g.directed)

    def index(self, seq) -> np.ndarray:
        pos = np.searchsorted(self.vertices, seq)
        if len(seq) and not np.array_equal(self.vertices[pos], np.asarray(seq)):
            raise KeyError("vertex is not a boundary vertex of the division")
        return pos

    def of(self, seq) -> np.ndarray:
        """Sub-matrix of rows for the boundary sequence ``seq``."""
        return self.rows[self.index(np.asarray(seq, dtype=np.int64))]


def pattern(u: int, cluster: Cluster, rows: BoundaryRows) -> np.ndarray:
    """Undirected pattern of ``u`` against ``cluster.boundary_sequence``."""
    d = rows.of(cluster.boundary_sequence)[:, u]
    if (d >= INF).any():
        raise ValueError(f"vertex {u} cannot reach every boundary vertex; "
                         "undirected patterns need a connected graph")
    return d - d[0]


def pattern_distance(p: np.ndarray, v: int, cluster: Cluster, rows: BoundaryRows) -> int:
    """``min_i d(v, s_i) + p[i]``."""
    d = rows.of(cluster.boundary_sequence)[:, v]
    return int((d + p).min())


def rebased_sequence(cluster: Cluster, base: int) -> tuple[int, ...]:
    """Boundary sequence with position ``base`` moved to the front."""
    seq = cluster.boundary_sequence
    return (seq[base],) + seq[:base] + seq[base + 1:]


def clip(diff: np.ndarray, r: int) -> np.ndarray:
    out = np.asarray(diff, dtype=np.int64).copy()
    out[diff <= -r] = NEG_INF
    out[diff >= r] = POS_INF
    return out


def infinite_pattern(u: int, cluster: Cluster, base: int, to_rows: BoundaryRows) -> np.ndarray:
    """Directed pattern of ``u`` w.r.t. the sequence based at position ``base``.

    ``to_rows`` holds ``d(. -> s)`` rows. Entries follow ``rebased_sequence``;
    a boundary vertex unreachable from ``u`` gets ``POS_INF``.
    """
    seq = rebased_sequence(cluster, base)
    d = to_rows.of(seq)[:, u]
    if d[0] >= INF:
        raise ValueError(f"base {seq[0]} is unreachable from {u}")
    return clip(d - d[0], cluster.size)


def reach_sets(g: Graph, cluster: Cluster, seq=None) -> np.ndarray:
    """``reach[i, j]``: boundary vertex ``seq[i]`` reaches ``cluster.vertices[j]``
    by a directed path inside the cluster."""
    seq = cluster.boundary_sequence if seq is None else seq
    local = {v: j for j, v in enumerate(cluster.vertices)}
    out = np.zeros((len(seq), cluster.size), dtype=bool)
    for i, s in enumerate(seq):
        out[i, local[s]] = True
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y, _, _ in g.out_adj[x]:
                j = local.get(y)
                if j is not None and not out[i, j]:
                    out[i, j] = True
                    queue.append(y)
    return out


def infinite_pattern_distance(p: np.ndarray, reach: np.ndarray, from_boundary: np.ndarray,
                              absent: np.ndarray | None = None):
    """Distance from a directed pattern to one cluster vertex ``v``.

    ``reach`` (bool per sequence position) marks boundary vertices reaching
    ``v`` inside the cluster; ``from_boundary[i]`` is ``d_G(s_i -> v)``.
    Returns ``UNDEFINED`` if ``p`` has a ``POS_INF`` entry, ``NEG_INF`` if a
    reaching position holds ``NEG_INF`` or nothing reaches ``v``, else the
    minimum of ``d(s_i -> v) + p[i]`` over reaching positions.

    ``absent`` marks positions whose boundary vertex is unreachable from the
    pattern's owner; those terms are dropped instead of making the result
    undefined, and if nothing else reaches ``v`` the result is UNREACHABLE.
    """
    p = np.asarray(p)
    reach = np.asarray(reach, dtype=bool)
    if absent is None:
        if (p == POS_INF).any():
            return UNDEFINED
        terms = reach
    else:
        absent = np.asarray(absent, dtype=bool)
        if ((p == POS_INF) & ~absent).any():
            return UNDEFINED
        terms = reach & ~absent
        if reach.any() and not terms.any():
            return UNREACHABLE
    if not terms.any():
        return NEG_INF
    if (p[terms] == NEG_INF).any():
        return NEG_INF
    return int((np.asarray(from_boundary)[terms] + p[terms]).min())


class PatternTable:
    """Pattern -> id map with one payload slot per id.

    Keys are the raw bytes of the int64 entry vector (sentinels included), so
    lookups cost O(len(pattern)) like a trie walk.
    """

    def __init__(self, width: int):
        self.width = width
        self._ids: dict[bytes, int] = {}
        self.patterns: list[np.ndarray] = []
        self.payload: list = []

    def __len__(self):
        return len(self.patterns)

    def __contains__(self, p):
        return self._key(p) in self._ids

    def _key(self, p) -> bytes:
        p = np.ascontiguousarray(p, dtype=np.int64)
        if p.shape != (self.width,):
            raise ValueError(f"pattern width {p.shape} != {self.width}")
        return p.tobytes()

    def insert(self, p, payload=None) -> int:
        key = self._key(p)
        pid = self._ids.get(key)
        if pid is None:
            pid = len(self.patterns)
            self._ids[key] = pid
            self.patterns.append(np.frombuffer(key, dtype=np.int64).copy())
            self.payload.append(payload)
        return pid

    def lookup(self, p) -> int | None:
        return self._ids.get(self._key(p))

    def matrix(self) -> np.ndarray:
        if not self.patterns:
            return np.zeros((0, self.width), dtype=np.int64)
        return np.vstack(self.patterns)

    @classmethod
    def from_rows(cls, rows: np.ndarray) -> tuple["PatternTable", np.ndarray]:
        """Bulk insert; returns the table and each row's pattern id."""
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        table = cls(rows.shape[1])
        if rows.shape[1] == 0:
            ids = np.zeros(len(rows), dtype=np.int64)
            if len(rows):
                table.insert(np.zeros(0, dtype=np.int64))
            return table, ids
        uniq, first, inv = np.unique(rows, axis=0, return_index=True, return_inverse=True)
        # ids in order of first appearance
        order = np.argsort(first)
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        for k in order:
            table.insert(uniq[k])
        return table, rank[inv.ravel()]


def pattern_distance_matrix(patterns: np.ndarray, from_boundary: np.ndarray) -> np.ndarray:
    """``out[p, v] = min_i patterns[p, i] + from_boundary[i, v]`` (finite patterns)."""
    m, b = patterns.shape
    out = patterns[:, 0:1] + from_boundary[0][None, :]
    for i in range(1, b):
        np.minimum(out, patterns[:, i:i + 1] + from_boundary[i][None, :], out=out)
    return out


def pattern_count_cap(boundary: int, size: int, k: int = 4) -> int:
    """Sauer-Shelah cap on distinct patterns: ground ``|dH| * (2|V(H)|-1)``."""
    from .set_systems import sauer_shelah_bound

    return sauer_shelah_bound(boundary * (2 * size - 1), k)
