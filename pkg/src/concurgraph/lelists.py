"""Least-element lists by batched multi-source BFS.

Vertices are taken in priority order in batches of growing size. Each batch
runs one level-synchronous BFS from all of its members at once over
(vertex, source) pairs. A pair is extended only while its hop count beats the
best distance any earlier batch achieved at that vertex, which is frozen at
the start of the batch. Every accepted pair becomes a candidate triple; a
final per-vertex sweep in priority order keeps exactly the list entries.

Local search is deliberately absent here: hop counts must come out exact, so
every level has to finish before the next one starts.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .atomics import atomic_min, fetch_add
from .config import Params, batch_bounds
from .generators import rng_for
from .graph import Graph, GraphError
from .hashbag import OK, BagFullError, HashBag, bag_insert
from .parallel import claim, get_pool, worker_streams
from .reach import ReachPairTable, TableOverflowError, table_insert

INF = np.iinfo(np.int64).max


@dataclass
class LeLists:
    """Lists stored CSR style; entries of one vertex are in priority order."""

    offsets: np.ndarray
    sources: np.ndarray
    dists: np.ndarray
    timings: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.offsets.size - 1

    def __getitem__(self, v: int) -> list[tuple[int, int]]:
        lo, hi = self.offsets[v], self.offsets[v + 1]
        return list(zip(self.sources[lo:hi].tolist(), self.dists[lo:hi].tolist()))

    def as_lists(self) -> list[list[tuple[int, int]]]:
        return [self[v] for v in range(self.n)]

    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    def to_text(self) -> str:
        lines = []
        for v in range(self.n):
            body = " ".join(f"({s},{d})" for s, d in self[v])
            lines.append(f"{v}: {body}")
        return "\n".join(lines) + ("\n" if lines else "")


def parse_lelists(text: str) -> list[list[tuple[int, int]]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        head, _, body = line.partition(":")
        if int(head) != len(out):
            raise ValueError(f"line {lineno}: expected vertex {len(out)}, got {head!r}")
        entries = []
        for tok in body.split():
            s, d = tok.strip("()").split(",")
            entries.append((int(s), int(d)))
        out.append(entries)
    return out


def check_list(entries, rank) -> bool:
    """Priority strictly increasing, distance strictly decreasing, ends at distance 0."""
    if not entries:
        return False
    for (s1, d1), (s2, d2) in zip(entries, entries[1:]):
        if rank[s1] >= rank[s2] or d1 <= d2:
            return False
    return entries[-1][1] == 0


def random_priority(n: int, seed: int) -> np.ndarray:
    """A vertex order, earliest first."""
    return rng_for(seed).permutation(n).astype(np.int64)


# ---------------------------------------------------------------------------
# candidate filtering


@njit(nogil=True, cache=True)
def _filter_kernel(worker, nworkers, cursor, offsets, dists, keep):
    n = offsets.shape[0] - 1
    while True:
        start, end = claim(cursor, 256, n)
        if start >= n:
            return
        for v in range(start, end):
            best = INF
            for i in range(offsets[v], offsets[v + 1]):
                if dists[i] < best:
                    best = dists[i]
                    keep[i] = 1


def filter_candidates(cands, rank) -> list[tuple[int, int]]:
    """Exact list entries from one vertex's candidate (source, distance) pairs."""
    cands = sorted(set(cands), key=lambda sd: (rank[sd[0]], sd[1]))
    out = []
    best = None
    for s, d in cands:
        if best is None or d < best:
            out.append((s, d))
            best = d
    return out


def lelist_pair_dedup(table: ReachPairTable, source: int, target: int) -> bool:
    """True iff (target, source) was not yet recorded."""
    return table.insert(target, source)


# ---------------------------------------------------------------------------
# batched multi-BFS


@njit(nogil=True, cache=True)
def _bfs_level(worker, nworkers, cursor, offsets, targets, frontier, d, delta_prev, delta_next,
               table, bag, rng, tu, ts, td, tcount, status):
    total = frontier.shape[0]
    while True:
        start, end = claim(cursor, 16, total)
        if start >= total or status[0] != 0:
            return
        for j in range(start, end):
            key = frontier[j]
            x = key >> 32
            s = key & 0xFFFFFFFF
            for e in range(offsets[x], offsets[x + 1]):
                u = targets[e]
                if d >= delta_prev[u]:
                    continue
                r = table_insert(table, u, s)
                if r < 0:
                    status[0] = 2
                    return
                if r == 0:
                    continue
                k = fetch_add(tcount, 0, 1)
                tu[k] = u
                ts[k] = s
                td[k] = d
                atomic_min(delta_next, u, d)
                if bag_insert(bag, (np.int64(u) << 32) | s, rng, worker, -1) != OK:
                    status[0] = 1
                    return


def _next_pow2(x: int) -> int:
    return 1 << max(int(x) - 1, 1).bit_length()


def run_lelists(g: Graph, priority=None, params: Params | None = None) -> LeLists:
    """LE-lists of every vertex; ``priority`` lists the vertices earliest first."""
    params = params or Params()
    if not g.symmetric:
        raise GraphError("run_lelists needs an undirected (symmetric) graph")
    n = g.n
    if priority is None:
        priority = random_priority(n, params.seed)
    priority = np.asarray(priority, np.int64)
    if priority.size != n or not np.array_equal(np.sort(priority), np.arange(n)):
        raise GraphError("priority must be a permutation of the vertices")
    rank = np.empty(n, np.int64)
    rank[priority] = np.arange(n)
    pool = get_pool(params.nthreads)
    rng = worker_streams(params.seed, pool.threads)
    timings = {"multi_bfs": 0.0, "table_resize": 0.0, "filter": 0.0}

    delta = np.full(n, INF, np.int64)
    parts_u, parts_s, parts_d = [], [], []
    prev_pairs = 0
    bounds = batch_bounds(n, params.beta)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        batch = priority[lo:hi]
        cap = _next_pow2(max(4 * batch.size, 2 * prev_pairs, 64))
        while True:
            t0 = time.perf_counter()
            try:
                cand, delta = _run_batch(g, batch, delta, cap, params, pool, rng)
                timings["multi_bfs"] += time.perf_counter() - t0
                break
            except TableOverflowError:
                timings["table_resize"] += time.perf_counter() - t0
                cap *= 2
        prev_pairs = cand[0].size
        parts_u.append(cand[0])
        parts_s.append(cand[1])
        parts_d.append(cand[2])

    t0 = time.perf_counter()
    cu = np.concatenate(parts_u) if parts_u else np.zeros(0, np.int64)
    cs = np.concatenate(parts_s) if parts_s else np.zeros(0, np.int64)
    cd = np.concatenate(parts_d) if parts_d else np.zeros(0, np.int64)
    order = np.lexsort((cd, rank[cs], cu))
    cu, cs, cd = cu[order], cs[order], cd[order]
    offsets = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(cu, minlength=n), out=offsets[1:])
    keep = np.zeros(cu.size, np.uint8)
    pool.run(_filter_kernel, n, offsets, cd, keep)
    sel = keep.astype(bool)
    out_off = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(cu[sel], minlength=n), out=out_off[1:])
    timings["filter"] = time.perf_counter() - t0
    return LeLists(out_off, cs[sel], cd[sel], timings)


def _run_batch(g, batch, delta_prev, cap, params, pool, rng):
    table = ReachPairTable(cap)
    limit = table.state.limit
    bag = HashBag(limit, params.lam, params.sigma, params.alpha, params.kappa, seed=params.seed)
    tu = np.empty(limit + batch.size, np.int64)
    ts = np.empty_like(tu)
    td = np.empty_like(tu)
    tcount = np.zeros(1, np.int64)
    status = np.zeros(1, np.int64)
    delta_next = delta_prev.copy()

    table.insert_many(batch, batch)
    k = batch.size
    tu[:k] = batch
    ts[:k] = batch
    td[:k] = 0
    tcount[0] = k
    delta_next[batch] = 0
    frontier = (batch << 32) | batch
    d = 0
    while frontier.size:
        d += 1
        pool.run(_bfs_level, frontier.size, g.offsets, g.targets, frontier, d, delta_prev,
                 delta_next, table.state, bag.state, rng, tu, ts, td, tcount, status)
        if status[0] == 2:
            raise TableOverflowError("pair table over its limit")
        if status[0] == 1:
            raise BagFullError("frontier bag overflowed")
        frontier = bag.extract_all()
    c = int(tcount[0])
    return (tu[:c].copy(), ts[:c].copy(), td[:c].copy()), delta_next
