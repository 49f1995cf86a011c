"""Unweighted digraphs: nested-ball distance oracle and eccentricities.

Oracle. For a cluster ``R`` and a vertex ``u`` outside it, the boundary
vertices reachable from ``u`` sorted by ``d(u -> s)`` give radii
``r_1 < r_2 < ...``; ball ``i`` restricted to ``R`` is
``Y_i = {v in R : d(u -> v) <= r_i}``. Distinct restrictions are stored once
per cluster together with ``d(Y -> v)`` for every ``v`` in ``R``, so a query
is a binary search over ``u``'s radii.

Eccentricities. For each ``(u, R)`` the pattern is built against the
boundary vertex farthest from ``u`` (maximum base), which makes
``d(u -> s_t) + max_v d(p -> v)`` the farthest distance from ``u`` into ``R``.
Per-pattern maxima are memoized, so they are computed once per distinct
pattern.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph_core import INF, UNREACHABLE, Graph, is_connected, is_strongly_connected, \
    multi_source_rows, to_scalar
from .patterns import NEG_INF, POS_INF, BoundaryRows, PatternTable, clip, reach_sets
from .rdivision import Cluster, RDivision, build_r_division
from .set_systems import sauer_shelah_bound
from .undirected import FORMAT_VERSION, _check_header, _pack, _unpack, r_preset

_MAGIC = 0x4D5643_44  # "MVCD"


def _require_unit_directed(g: Graph):
    if not g.directed:
        raise ValueError("expected a digraph")
    if g.weighted:
        raise ValueError("directed algorithms assume unit weights")
    if not is_connected(g):
        raise ValueError("underlying undirected graph is disconnected; run per component")


def min_plus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``out[x, y] = min_k a[x, k] + b[k, y]`` on INF-coded distances."""
    if a.shape[1] == 0:
        return np.full((a.shape[0], b.shape[1]), INF, dtype=np.int64)
    out = a[:, 0:1] + b[0][None, :]
    for k in range(1, a.shape[1]):
        np.minimum(out, a[:, k:k + 1] + b[k][None, :], out=out)
    out[out >= INF] = INF
    return out


@dataclass
class _Side:
    """Boundary distances of one cluster."""

    seq: tuple
    vertices: np.ndarray
    to_b: np.ndarray  # n x b: d(u -> s_i)
    from_b: np.ndarray  # b x |R|: d(s_i -> v)
    intra: np.ndarray  # |R| x |R| global distances
    d_in: np.ndarray  # |R| x |R| in-cluster distances


def _side(g: Graph, c: Cluster, fwd: BoundaryRows, rev: BoundaryRows) -> _Side:
    vs = np.asarray(c.vertices, dtype=np.int64)
    sub, _ = g.induced(c.vertices)
    d_in = multi_source_rows(sub, np.arange(len(vs)))
    seq = c.boundary_sequence
    if not seq:
        empty = np.zeros((g.n, 0), dtype=np.int64)
        return _Side(seq, vs, empty, np.zeros((0, len(vs)), dtype=np.int64), d_in, d_in)
    to_b = rev.of(seq).T.copy()
    from_b = fwd.of(seq)[:, vs]
    intra = np.minimum(d_in, min_plus(to_b[vs], from_b))
    return _Side(seq, vs, to_b, from_b, intra, d_in)


def _prepare(g: Graph, r, h, division, rule):
    _require_unit_directed(g)
    if division is None:
        division = build_r_division(g, r if r is not None else r_preset(g.n, rule, h))
    fwd = BoundaryRows.compute(g, division)
    rev = BoundaryRows.compute(g, division, reverse=True)
    return division, fwd, rev


class DirectedOracle:
    """Exact distance oracle for unit-weight digraphs, O(log n) queries."""

    def __init__(self, n, r, h, owner, local, sizes, intra, restr, dY, lst_ptr, radii, rid,
                 to_boundary, boundary):
        self.n, self.r, self.h = int(n), int(r), int(h)
        self.owner, self.local, self.sizes = owner, local, sizes
        self.intra = intra  # list per cluster: |R| x |R|
        self.restr = restr  # list per cluster: K x |R| bool
        self.dY = dY  # list per cluster: K x |R|
        self.lst_ptr = lst_ptr  # C x (n+1) offsets into radii/rid
        self.radii = radii  # flat
        self.rid = rid  # flat, restriction id local to the cluster
        self.to_boundary = to_boundary  # |B| x n, d(u -> s)
        self.boundary = boundary  # list per cluster of boundary sequences
        self._flatten()

    def _flatten(self):
        self._in_off = np.cumsum([0] + [a.size for a in self.intra])[:-1]
        self._in_flat = np.concatenate([a.ravel() for a in self.intra])
        K = np.array([a.shape[0] for a in self.dY], dtype=np.int64)
        self._rid_base = np.cumsum(np.concatenate([[0], K]))[:-1]
        row_off = []
        pos = 0
        for a in self.dY:
            row_off.append(pos + np.arange(a.shape[0], dtype=np.int64) * a.shape[1])
            pos += a.size
        self._row_off = np.concatenate(row_off) if row_off else np.zeros(0, dtype=np.int64)
        self._dy_flat = np.concatenate([a.ravel() for a in self.dY]) if self.dY else np.zeros(0, dtype=np.int64)

    @classmethod
    def build(cls, g: Graph, r: int | None = None, h: int = 5,
              division: RDivision | None = None) -> "DirectedOracle":
        div, fwd, rev = _prepare(g, r, h, division, "directed_oracle")
        C = len(div.clusters)
        lst_ptr = np.zeros((C, g.n + 1), dtype=np.int64)
        radii_all, rid_all = [], []
        pos = 0
        intra, restr, dYs, bnds = [], [], [], []
        for c in div.clusters:
            s = _side(g, c, fwd, rev)
            intra.append(s.intra)
            bnds.append(np.asarray(s.seq, dtype=np.int64))
            ids: dict[bytes, int] = {}
            rows = []
            inside = np.zeros(g.n, dtype=bool)
            inside[s.vertices] = True
            ptr = lst_ptr[c.id]
            if s.seq:
                out_u = np.flatnonzero(~inside)
                # d(u -> v) for outside u, v in R, via the boundary
                for chunk in np.array_split(out_u, max(1, len(out_u) // 512)):
                    d_uR = min_plus(s.to_b[chunk], s.from_b)
                    for u, du in zip(chunk, d_uR):
                        tb = s.to_b[u]
                        rad = np.unique(tb[tb < INF])
                        ptr[u] = pos
                        if len(rad) == 0:
                            continue
                        balls = du[None, :] <= rad[:, None]
                        keys = np.packbits(balls, axis=1)
                        for ball, key in zip(balls, keys):
                            kb = key.tobytes()
                            k = ids.get(kb)
                            if k is None:
                                k = ids[kb] = len(rows)
                                rows.append(ball)
                            rid_all.append(k)
                        radii_all.append(rad)
                        pos += len(rad)
            # vertices before the first outside one, and inside ones, get empty lists
            _fill_ptr(ptr, inside, pos)
            Y = np.array(rows, dtype=bool).reshape(len(rows), c.size)
            restr.append(Y)
            dYs.append(_ball_distances(Y, s.intra))
        radii = np.concatenate(radii_all) if radii_all else np.zeros(0, dtype=np.int64)
        rid = np.array(rid_all, dtype=np.int64)
        sizes = np.array([c.size for c in div.clusters], dtype=np.int64)
        return cls(g.n, div.r, h, div.owner.copy(), div.local_index(), sizes, intra, restr,
                   dYs, lst_ptr, radii, rid, rev.rows, bnds)

    # ---- queries

    def _segment(self, c, u):
        return self.lst_ptr[c, u], self.lst_ptr[c, u + 1]

    def ball_list(self, u: int, c: int) -> list[tuple[int, np.ndarray]]:
        """``L(u, R)``: (radius, restriction bitset over cluster vertices)."""
        lo, hi = self._segment(c, u)
        return [(int(self.radii[k]), self.restr[c][self.rid[k]]) for k in range(lo, hi)]

    def query(self, u: int, v: int):
        c = self.owner[v]
        lv = self.local[v]
        w = self.sizes[c]
        if self.owner[u] == c:
            return to_scalar(self._in_flat[self._in_off[c] + self.local[u] * w + lv])
        lo, hi = self._segment(c, u)
        if lo == hi:
            return UNREACHABLE
        dY = self.dY[c]
        # first position whose ball contains v (membership is monotone)
        a, b = lo, hi
        while a < b:
            mid = (a + b) // 2
            if dY[self.rid[mid], lv] == 0:
                b = mid
            else:
                a = mid + 1
        if a == lo:
            return int(self.radii[lo])
        i = a - 1
        via = dY[self.rid[i], lv]
        d = int(self.radii[i] + via) if via < INF else None
        if a < hi:
            # v entered with ball a: it is then at most radius r_a away
            d = int(self.radii[a]) if d is None else min(d, int(self.radii[a]))
        return UNREACHABLE if d is None else d

    def query_many(self, us, vs) -> np.ndarray:
        """Vectorized queries; INF-coded result array."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        c = self.owner[vs]
        lv = self.local[vs]
        w = self.sizes[c]
        out = np.full(len(us), INF, dtype=np.int64)
        same = self.owner[us] == c
        out[same] = self._in_flat[self._in_off[c[same]] + self.local[us[same]] * w[same] + lv[same]]
        x = np.flatnonzero(~same)
        if len(x) == 0 or len(self.radii) == 0:
            return out
        cx, ux, lvx = c[x], us[x], lv[x]
        lo = self.lst_ptr[cx, ux]
        hi = self.lst_ptr[cx, ux + 1]
        a, b = lo.copy(), hi.copy()
        base = self._rid_base[cx]

        def dy(k, m):
            # payload lookups only for lanes in mask m; k is meaningless elsewhere
            out = np.full(len(k), INF, dtype=np.int64)
            out[m] = self._dy_flat[self._row_off[base[m] + self.rid[k[m]]] + lvx[m]]
            return out

        while True:
            act = a < b
            if not act.any():
                break
            mid = (a + b) // 2
            inball = dy(mid, act) == 0
            b = np.where(act & inball, mid, b)
            a = np.where(act & ~inball, mid + 1, a)
        nonempty = lo < hi
        res = np.full(len(x), INF, dtype=np.int64)
        first = nonempty & (a == lo)
        res[first] = self.radii[lo[first]]
        rest = nonempty & (a > lo)
        i = np.where(rest, a - 1, 0)
        via = dy(i, rest)
        cand = np.where(rest & (via < INF), self.radii[i] + via, INF)
        inner = rest & (a < hi)
        cand = np.where(inner, np.minimum(cand, self.radii[np.where(inner, a, 0)]), cand)
        res[rest] = cand[rest]
        out[x] = res
        return out

    def distance_matrix(self) -> np.ndarray:
        u, v = np.divmod(np.arange(self.n * self.n), self.n)
        return self.query_many(u, v).reshape(self.n, self.n)

    def restriction_counts(self) -> list[int]:
        return [a.shape[0] for a in self.restr]

    def restriction_caps(self, k: int = 4) -> list[int]:
        return [sauer_shelah_bound(int(s), k) for s in self.sizes]

    def nbytes(self) -> int:
        arrays = [self.owner, self.local, self.sizes, self.lst_ptr, self.radii, self.rid,
                  self.to_boundary, self._in_flat, self._dy_flat]
        arrays += self.restr + self.boundary
        return int(sum(a.nbytes for a in arrays))

    # ---- serialization

    def save(self, path) -> None:
        sections = {
            "header": np.array([_MAGIC, FORMAT_VERSION, self.n, self.r, self.h], dtype=np.int64),
            "owner": self.owner, "local": self.local, "sizes": self.sizes,
            "lst_ptr": self.lst_ptr, "radii": self.radii, "rid": self.rid,
            "to_boundary": self.to_boundary,
        }
        sections.update(_pack("boundary", self.boundary))
        sections.update(_pack("intra", self.intra))
        sections.update(_pack("restr", self.restr))
        sections.update(_pack("dY", self.dY))
        with open(path, "wb") as fh:
            np.savez(fh, **sections)

    @classmethod
    def load(cls, path) -> "DirectedOracle":
        with np.load(path, allow_pickle=False) as z:
            header = z["header"]
            _check_header(header, _MAGIC, "directed")
            n, r, h = (int(x) for x in header[2:5])
            return cls(n, r, h, z["owner"], z["local"], z["sizes"], _unpack(z, "intra"),
                       _unpack(z, "restr"), _unpack(z, "dY"), z["lst_ptr"], z["radii"],
                       z["rid"], z["to_boundary"], _unpack(z, "boundary"))


def _fill_ptr(ptr: np.ndarray, inside: np.ndarray, end: int):
    """Make ``ptr`` a valid offset array: unset entries inherit the next start."""
    n = len(inside)
    ptr[n] = end
    nxt = end
    for u in range(n - 1, -1, -1):
        if inside[u]:
            ptr[u] = nxt
        nxt = ptr[u]
    # outside vertices with no radii already point at their (empty) start


def _ball_distances(Y: np.ndarray, intra: np.ndarray) -> np.ndarray:
    """``d(Y -> v) = min_{y in Y} d(y -> v)`` for every restriction and ``v``."""
    out = np.empty(Y.shape, dtype=np.int64)
    for k, mask in enumerate(Y):
        out[k] = intra[mask].min(axis=0) if mask.any() else INF
    return out


def build_directed_oracle(g: Graph, r: int | None = None, h: int = 5,
                          division: RDivision | None = None) -> DirectedOracle:
    return DirectedOracle.build(g, r, h, division)


def query_directed(o: DirectedOracle, u: int, v: int):
    return o.query(u, v)


@dataclass
class DirectedEccResult:
    ecc: np.ndarray  # max finite d(u -> v)
    diameter: int
    strongly_connected: bool
    pattern_counts: list = field(default_factory=list)  # distinct max-base patterns per cluster


def _pattern_reach_distances(p, reach, from_b):
    """``d(p -> v)`` for every cluster vertex, with unreachable positions dropped.

    Entries: a finite value, ``NEG_INF``, or ``INF`` when no reaching boundary
    vertex is reachable from the pattern's owner.
    """
    absent = p == POS_INF
    terms = reach & ~absent[:, None]
    neg = (terms & (p == NEG_INF)[:, None]).any(axis=0)
    finite = terms & (p != NEG_INF)[:, None]
    vals = np.where(finite, from_b + np.where(absent | (p == NEG_INF), 0, p)[:, None], INF).min(axis=0)
    vals[neg] = NEG_INF
    vals[~terms.any(axis=0)] = INF
    return vals


def directed_eccentricities(g: Graph, r: int | None = None, h: int = 5,
                            division: RDivision | None = None) -> DirectedEccResult:
    """Eccentricities ``max{d(u -> v) finite}`` and the directed diameter."""
    div, fwd, rev = _prepare(g, r, h, division, "directed_ecc")
    ecc = np.zeros(g.n, dtype=np.int64)
    counts = []
    for c in div.clusters:
        s = _side(g, c, fwd, rev)
        inside = np.zeros(g.n, dtype=bool)
        inside[s.vertices] = True
        local = {int(v): j for j, v in enumerate(s.vertices)}
        b = len(s.seq)
        if b == 0:
            d = np.where(s.d_in < INF, s.d_in, -1).max(axis=1)
            ecc[s.vertices] = np.maximum(ecc[s.vertices], d)
            counts.append(0)
            continue
        reach = reach_sets(g, c)
        size = c.size
        to_b = s.to_b
        fin = to_b < INF
        has = fin.any(axis=1)
        base = np.where(fin, to_b, -1).argmax(axis=1)
        d_base = to_b[np.arange(g.n), base]
        pats = clip(to_b - d_base[:, None], size)
        # maximum base: no reachable boundary vertex is farther than the base
        assert not ((pats == POS_INF) & fin)[has].any()
        tables: dict[int, PatternTable] = {}
        for u in np.flatnonzero(has | inside):
            u = int(u)
            if has[u]:
                t = int(base[u])
                order = [t] + [i for i in range(b) if i != t]
                table = tables.setdefault(t, PatternTable(b))
                key = pats[u, order]
                pid = table.lookup(key)
                if pid is None:
                    vec = _pattern_reach_distances(pats[u], reach, s.from_b)
                    ok = (vec != NEG_INF) & (vec < INF)
                    far = int(vec[ok].max()) if ok.any() else None
                    pid = table.insert(key, (far, vec))
                far, vec = table.payload[pid]
            if not inside[u]:
                if far is not None:
                    ecc[u] = max(ecc[u], int(d_base[u]) + far)
                continue
            dr = s.d_in[local[u]]
            if has[u]:
                route = np.where(vec == NEG_INF, NEG_INF, np.minimum(d_base[u] + vec, INF))
                dr = np.minimum(dr, route)
            ok = (dr >= 0) & (dr < INF)
            if ok.any():
                ecc[u] = max(ecc[u], int(dr[ok].max()))
        counts.append(sum(len(t) for t in tables.values()))
    return DirectedEccResult(ecc, int(ecc.max(initial=0)), is_strongly_connected(g), counts)
