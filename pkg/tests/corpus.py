"""Seeded graph corpus shared by the acceptance suite.

20 random planar graphs (ten each at n = 200 and n = 600, odd seeds thinned so
faces are not all triangles) plus grid(25, 25). Directed variants orient each
edge at random, keeping 30% of edges bidirectional (85% for seeds 0 and 1).
"""

import re
from functools import lru_cache

from minorvc.graph_core import all_pairs, grid, orient, random_planar

SEEDS = range(10)
SIZES = (200, 600)


def names():
    out = [f"random_planar:n={n},seed={s}" for n in SIZES for s in SEEDS]
    return out + ["grid:25,25"]


@lru_cache(maxsize=None)
def undirected(name):
    if name.startswith("grid"):
        return grid(25, 25)
    n, s = (int(part.split("=")[1]) for part in name.split(":")[1].split(","))
    return random_planar(n, seed=s, drop=0.3 if s % 2 else 0.0)


@lru_cache(maxsize=None)
def directed(name):
    # seeds 0 and 1 keep most edges two-way, so the corpus has strongly
    # connected digraphs as well as ones that are not
    both = 0.85 if re.search(r"seed=[01]$", name) else 0.3
    return orient(undirected(name), seed=_seed(name), both=both)


def _seed(name):
    # stable across interpreter runs (str hash is randomized)
    return sum(ord(c) * (i + 1) for i, c in enumerate(name)) % 100_003


@lru_cache(maxsize=None)
def brute(name, is_directed=False):
    return all_pairs(directed(name) if is_directed else undirected(name))
