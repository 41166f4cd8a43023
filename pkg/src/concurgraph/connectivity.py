"""Connected components: low-diameter decomposition, then union-find on cross edges.

The decomposition permutes the vertices into batches growing by a factor of
1.2. Each round grows the current clusters by one search step (several hops
when local search applies) and then injects the next batch's unreached
vertices as new cluster centres. Cluster labels are then merged over every
edge whose endpoints ended up in different clusters.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .atomics import cas, fetch_add
from .config import Params, batch_bounds
from .generators import rng_for
from .graph import Graph, GraphError
from .parallel import claim, get_pool, mix64
from .reach import FrontierSearch

LDD_GROWTH = 1.2


# ---------------------------------------------------------------------------
# concurrent union-find


@njit(nogil=True, cache=True)
def uf_find(parent, x):
    """Root of ``x``, halving the path as it goes."""
    while True:
        p = parent[x]
        if p == x:
            return x
        gp = parent[p]
        if gp != p:
            cas(parent, x, p, gp)
        x = gp


@njit(nogil=True, cache=True)
def _prio(x, salt):
    return mix64(np.uint64(x) ^ salt)


@njit(nogil=True, cache=True)
def uf_union(parent, a, b, salt):
    """Link the roots of ``a`` and ``b``; True iff this call merged two sets."""
    while True:
        ra = uf_find(parent, a)
        rb = uf_find(parent, b)
        if ra == rb:
            return False
        pa = _prio(ra, salt)
        pb = _prio(rb, salt)
        if pa < pb or (pa == pb and ra < rb):
            if cas(parent, ra, ra, rb):
                return True
        elif cas(parent, rb, rb, ra):
            return True


@njit(nogil=True, cache=True)
def _union_pairs(worker, nworkers, cursor, parent, a, b, salt, linked):
    total = a.shape[0]
    while True:
        start, end = claim(cursor, 64, total)
        if start >= total:
            return
        for j in range(start, end):
            if uf_union(parent, a[j], b[j], salt):
                linked[j] = 1


@njit(nogil=True, cache=True)
def _find_all(worker, nworkers, cursor, parent, out):
    total = out.shape[0]
    while True:
        start, end = claim(cursor, 1024, total)
        if start >= total:
            return
        for v in range(start, end):
            out[v] = uf_find(parent, v)


class UnionFind:
    """Randomised-priority linking with CAS; safe for concurrent unions and finds."""

    def __init__(self, n: int, seed: int = 0):
        self.parent = np.arange(n, dtype=np.int64)
        self.salt = np.uint64(mix64(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)))

    def find(self, x: int) -> int:
        return int(uf_find(self.parent, np.int64(x)))

    def union(self, a: int, b: int) -> bool:
        return bool(uf_union(self.parent, np.int64(a), np.int64(b), self.salt))

    def union_many(self, a, b, threads: int | None = None) -> np.ndarray:
        """Concurrent unions; returns a flag per pair telling whether it merged."""
        a = np.ascontiguousarray(a, np.int64)
        b = np.ascontiguousarray(b, np.int64)
        linked = np.zeros(a.size, np.uint8)
        get_pool(threads).run(_union_pairs, a.size, self.parent, a, b, self.salt, linked)
        return linked.astype(bool)

    def roots(self, threads: int | None = None) -> np.ndarray:
        out = np.empty(self.parent.size, np.int64)
        get_pool(threads).run(_find_all, out.size, self.parent, out)
        return out


# ---------------------------------------------------------------------------
# LDD


@dataclass
class LddResult:
    label: np.ndarray  # cluster centre per vertex
    parent: np.ndarray  # discovering vertex, -1 for centres
    rounds: int


def ldd(g: Graph, params: Params | None = None, growth: float = LDD_GROWTH,
        edge_ok: np.ndarray | None = None) -> LddResult:
    """Cluster labels covering every vertex; clusters never span two components."""
    params = params or Params()
    if not g.symmetric:
        raise GraphError("ldd needs an undirected (symmetric) graph")
    n = g.n
    label = np.arange(n, dtype=np.int64)
    parent = np.full(n, -1, np.int64)
    visit = np.zeros(n, np.uint8)
    if n == 0:
        return LddResult(label, parent, 0)
    order = rng_for(params.seed).permutation(n)
    bounds = batch_bounds(n, growth)
    search = FrontierSearch(g, params, visit=visit, label=label, parent=parent, edge_ok=edge_ok)
    frontier = order[bounds[0]:bounds[1]].astype(np.int64)
    visit[frontier] = 1
    for lo, hi in zip(bounds[1:-1], bounds[2:]):
        frontier = search.expand(frontier) if frontier.size else frontier
        batch = order[lo:hi]
        fresh = batch[visit[batch] == 0].astype(np.int64)
        visit[batch] = 1
        frontier = np.concatenate([frontier, fresh]) if fresh.size else frontier
    return LddResult(label, parent, search.rounds)


# ---------------------------------------------------------------------------
# connectivity


@njit(nogil=True, cache=True)
def _cross_edges(worker, nworkers, cursor, offsets, targets, edge_ok, label, uf, salt, fa, fb, fcount):
    n = offsets.shape[0] - 1
    masked = edge_ok.shape[0] > 0
    record = fa.shape[0] > 0
    while True:
        start, end = claim(cursor, 256, n)
        if start >= n:
            return
        for v in range(start, end):
            lv = label[v]
            for e in range(offsets[v], offsets[v + 1]):
                u = targets[e]
                if u <= v or (masked and edge_ok[e] == 0):
                    continue
                lu = label[u]
                if lv == lu:
                    continue
                if uf_find(uf, lv) == uf_find(uf, lu):
                    continue
                if uf_union(uf, lv, lu, salt) and record:
                    k = fetch_add(fcount, 0, 1)
                    fa[k] = v
                    fb[k] = u


@dataclass
class CcResult:
    label: np.ndarray  # union-find root of each vertex's cluster
    ldd_rounds: int
    clusters: int
    timings: dict = field(default_factory=dict)
    forest: np.ndarray | None = None  # (k, 2) tree edges when requested

    def canonical(self) -> np.ndarray:
        """Labels renamed to the smallest vertex of each component."""
        _, first, inv = np.unique(self.label, return_index=True, return_inverse=True)
        return first[inv.ravel()].astype(np.int64)

    @property
    def count(self) -> int:
        return int(np.unique(self.label).size)


def run_cc(g: Graph, params: Params | None = None, edge_ok: np.ndarray | None = None,
           forest: bool = False) -> CcResult:
    """Connected components of ``g``, optionally restricted to edges with ``edge_ok`` set.

    With ``forest=True`` the result also holds a spanning forest: the edges along
    which LDD first reached each vertex plus every edge that merged two sets.
    """
    params = params or Params()
    pool = get_pool(params.nthreads)
    n = g.n
    timings = {}
    t0 = time.perf_counter()
    d = ldd(g, params, edge_ok=edge_ok)
    timings["ldd"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    uf = UnionFind(n, params.seed)
    cap = n if forest else 0
    fa = np.empty(cap, np.int64)
    fb = np.empty(cap, np.int64)
    fcount = np.zeros(1, np.int64)
    mask = np.zeros(0, np.uint8) if edge_ok is None else edge_ok
    pool.run(_cross_edges, n, g.offsets, g.targets, mask, d.label, uf.parent, uf.salt, fa, fb, fcount)
    roots = uf.roots(pool.threads)
    label = roots[d.label]
    timings["union_find"] = time.perf_counter() - t0

    edges = None
    if forest:
        child = np.flatnonzero(d.parent >= 0)
        k = int(fcount[0])
        edges = np.concatenate([
            np.stack([d.parent[child], child], axis=1),
            np.stack([fa[:k], fb[:k]], axis=1),
        ]).astype(np.int64)
    clusters = int(np.count_nonzero(d.label == np.arange(n)))
    return CcResult(label, d.rounds, clusters, timings, edges)
