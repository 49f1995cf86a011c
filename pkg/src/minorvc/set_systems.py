"""Set systems over graphs and exhaustive shattering / VC-dimension search.

Families are stored as a boolean incidence matrix (sets x ground) with
duplicate rows removed; the first occurrence keeps its provenance label.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from .graph_core import INF, Graph, multi_source_rows, shortest_path_tree

log = logging.getLogger(__name__)


class Vertex(NamedTuple):
    v: int


class Pair(NamedTuple):
    i: int  # 1-based boundary index
    delta: int


class Edge(NamedTuple):
    e: int


@dataclass(frozen=True)
class SetFamily:
    ground: tuple  # one GroundElement per column
    matrix: np.ndarray  # bool, sets x ground
    labels: tuple = ()

    @property
    def ground_size(self) -> int:
        return len(self.ground)

    def __len__(self):
        return self.matrix.shape[0]

    def sets(self) -> list[frozenset]:
        return [frozenset(self.ground[j] for j in np.flatnonzero(row)) for row in self.matrix]

    def bitsets(self) -> list[int]:
        out = []
        for row in self.matrix:
            out.append(sum(1 << int(j) for j in np.flatnonzero(row)))
        return out


def make_family(ground: Sequence, rows, labels: Sequence = ()) -> SetFamily:
    """Deduplicate ``rows`` (iterable of bool vectors or index collections)."""
    ground = tuple(ground)
    mats = []
    for row in rows:
        row = np.asarray(row)
        if row.dtype != bool:
            vec = np.zeros(len(ground), dtype=bool)
            vec[row.astype(np.int64)] = True
            row = vec
        mats.append(row)
    if not mats:
        return SetFamily(ground, np.zeros((0, len(ground)), dtype=bool), ())
    m = np.vstack(mats).astype(bool)
    if m.shape[1] == 0:
        return SetFamily(ground, m[:1], tuple(labels[:1]))
    _, first = np.unique(np.packbits(m, axis=1), axis=0, return_index=True)
    first = np.sort(first)
    lab = tuple(labels[i] for i in first) if len(labels) else ()
    return SetFamily(ground, m[first], lab)


def _dist_rows(g: Graph, reverse: bool = False) -> np.ndarray:
    return multi_source_rows(g, np.arange(g.n), reverse=reverse)


def _check_cap(g: Graph, cap: int):
    if g.n > cap:
        raise ValueError(f"graph has {g.n} vertices; exhaustive cap is {cap}")


def ball_system(g: Graph, directed: bool | None = None, cap: int = 64) -> SetFamily:
    """All balls ``B(v, r) = {u : d(v -> u) <= r}`` over realized radii."""
    _check_cap(g, cap)
    if directed is None:
        directed = g.directed
    if directed != g.directed:
        raise ValueError("directed flag must match the graph")
    d = _dist_rows(g)
    rows, labels = [], []
    for v in range(g.n):
        radii = np.unique(d[v][d[v] < INF])
        for rad in radii:
            rows.append(d[v] <= rad)
            labels.append((v, int(rad)))
    return make_family([Vertex(v) for v in range(g.n)], rows, labels)


def lp_hat_system(g: Graph, S: Sequence[int], M: Sequence[int], directed: bool | None = None,
                  variant: str = "hat") -> SetFamily:
    """Distance-difference family over ground ``[1, k-1] x M``.

    ``variant='hat'`` compares every terminal with ``s_0``; ``variant='lp'``
    compares consecutive terminals (the older system, kept for experiments).
    Vertices whose needed distances are unreachable (``s_0``, or for 'lp' any
    terminal) are left out of the family and logged.
    """
    S = [int(s) for s in S]
    if len(S) < 2:
        raise ValueError("need at least two terminals")
    if len(set(S)) != len(S):
        raise ValueError("terminals must be distinct")
    M = sorted(set(int(x) for x in M))
    if not M:
        raise ValueError("M must be nonempty")
    if variant not in ("hat", "lp"):
        raise ValueError("variant must be 'hat' or 'lp'")
    if directed is None:
        directed = g.directed
    # to_s[i, v] = d(v -> s_i)
    to_s = multi_source_rows(g, S, reverse=True)
    k = len(S)
    ground = [Pair(i, delta) for i in range(1, k) for delta in M]
    Marr = np.array(M, dtype=np.int64)
    rows, labels, skipped = [], [], []
    for v in range(g.n):
        d = to_s[:, v]
        if d[0] >= INF or (variant == "lp" and (d >= INF).any()):
            skipped.append(v)
            continue
        ref = d[0] if variant == "hat" else None
        row = np.zeros((k - 1, len(M)), dtype=bool)
        for i in range(1, k):
            if d[i] >= INF:
                continue
            diff = d[i] - (ref if variant == "hat" else d[i - 1])
            row[i - 1] = diff <= Marr
        rows.append(row.ravel())
        labels.append(v)
    if skipped:
        log.info("lp_hat_system: excluded %d vertices with unreachable terminals: %s",
                 len(skipped), skipped[:20])
    return make_family(ground, rows, labels)


def realized_differences(g: Graph, S: Sequence[int]) -> list[int]:
    """All finite values ``d(v, s_i) - d(v, s_0)`` over vertices and terminals."""
    to_s = multi_source_rows(g, list(S), reverse=True)
    ok = (to_s < INF).all(axis=0)
    diffs = to_s[1:, ok] - to_s[0, ok]
    return sorted(set(int(x) for x in np.unique(diffs)))


def sp_tree_system(g: Graph, cap: int = 64) -> SetFamily:
    _check_cap(g, cap)
    rows = [sorted(shortest_path_tree(g, v)) for v in range(g.n)]
    return make_family([Edge(e) for e in range(g.m)], rows, list(range(g.n)))


def restrict(f: SetFamily, X: Sequence[int]) -> SetFamily:
    """The X-restriction ``{Y & X}`` re-indexed over the columns in ``X``."""
    X = list(X)
    if not X:
        return SetFamily((), np.zeros((1, 0), dtype=bool), f.labels[:1])
    return make_family([f.ground[j] for j in X], f.matrix[:, X], f.labels)


@dataclass
class VCReport:
    dimension: int  # exact when not capped, else == cap
    capped: bool
    witness: tuple  # column indices of a largest shattered set found
    shattered_counts: list = field(default_factory=list)  # per size


def _traces_distinct(codes: np.ndarray) -> np.ndarray:
    """Number of distinct values in each column of ``codes``."""
    s = np.sort(codes, axis=0)
    return 1 + (np.diff(s, axis=0) != 0).sum(axis=0)


def vc_search(f: SetFamily, cap: int = 7, max_ground: int = 64) -> VCReport:
    """Level-wise exhaustive search for shattered sets up to size ``cap``.

    Size-(d+1) candidates extend a shattered size-d set by a larger column
    index, and are kept only if every d-subset was shattered too.
    """
    if cap > 7:
        raise ValueError("cap must be <= 7")
    if f.ground_size > max_ground:
        raise ValueError(f"ground size {f.ground_size} exceeds exhaustive limit {max_ground}")
    m = f.matrix.astype(np.uint8)
    nsets, ng = m.shape
    counts = []
    if nsets == 0:
        return VCReport(-1, False, (), counts)
    # the empty set is shattered by any nonempty family
    level = [()]
    counts.append(1)
    witness = ()
    for d in range(cap):
        if 1 << (d + 1) > nsets:
            break
        prev = set(level)
        nxt = []
        for Y in level:
            codes = np.zeros(nsets, dtype=np.int64)
            for j in Y:
                codes = codes * 2 + m[:, j]
            start = Y[-1] + 1 if Y else 0
            if start >= ng:
                continue
            cand = codes[:, None] * 2 + m[:, start:]
            ok = np.flatnonzero(_traces_distinct(cand) == 1 << (d + 1))
            for off in ok:
                Z = Y + (start + int(off),)
                if d == 0 or all(Z[:k] + Z[k + 1:] in prev for k in range(len(Z) - 1)):
                    nxt.append(Z)
        if not nxt:
            break
        level = nxt
        counts.append(len(level))
        witness = level[0]
    dim = len(witness)
    return VCReport(dim, dim >= cap, witness, counts)


def vc_dimension(f: SetFamily, cap: int = 7, max_ground: int = 64) -> int:
    """Exact VC dimension when below ``cap``; returns ``cap`` meaning ">= cap"."""
    return vc_search(f, cap, max_ground).dimension


def is_shattered(f: SetFamily, Y: Sequence[int]) -> bool:
    Y = list(Y)
    if not Y:
        return len(f) > 0
    traces = {tuple(row) for row in f.matrix[:, Y].tolist()}
    return len(traces) == 1 << len(Y)


def sauer_shelah_bound(n: int, k: int) -> int:
    return sum(comb(n, i) for i in range(0, k + 1))


def sauer_shelah_check(f: SetFamily, k: int) -> dict:
    bound = sauer_shelah_bound(f.ground_size, k)
    ratio = len(f) / bound
    return {"size": len(f), "ground": f.ground_size, "k": k, "bound": bound,
            "ratio": ratio, "violation": ratio > 1}
