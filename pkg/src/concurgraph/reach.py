"""Reachability searches with vertical granularity control.

Each round processes a frontier in parallel. A frontier vertex whose out-degree
is below ``tau`` runs a bounded sequential *local search*: it keeps a small
queue, examines neighbours one by one (every examined neighbour counts towards
the budget, successful or not) and walks on to newly reached vertices, so
several hops finish inside one task. When the budget runs out whatever is left
in the queue goes to the next frontier. Vertices with at least ``tau``
neighbours have their edge list split into blocks that are scanned in
parallel. Next frontiers are collected in a :class:`HashBag`.

Dense rounds reverse the direction: every candidate vertex scans its
in-neighbours for a frontier member.

Multi-source searches record ``(vertex, source)`` pairs in a
:class:`ReachPairTable` keyed on the vertex alone, so all sources of a vertex
sit on one linear-probe run and can be listed without a second index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit

from .atomics import cas, fetch_add
from .config import Params
from .graph import Graph, GraphError
from .hashbag import FULL, OK, HashBag, BagFullError, bag_insert
from .parallel import claim, get_pool, mix64, worker_streams

SPARSE = "sparse"
DENSE = "dense"

EDGE_BLOCK = 1024
TABLE_EMPTY = -1
TABLE_LOAD = 0.75

ST_OK = 0
ST_BAG_FULL = 1
ST_TABLE_FULL = 2


class TableOverflowError(RuntimeError):
    """The pair table passed its load limit; resize and rerun the search."""


class RoundStat(NamedTuple):
    size: int
    mode: str


@dataclass
class ReachResult:
    visited: np.ndarray  # bool per vertex, includes preset flags
    rounds: int
    stats: list[RoundStat] = field(default_factory=list)


# ---------------------------------------------------------------------------
# pair table


class TableState(NamedTuple):
    keys: np.ndarray  # int64 packed (vertex << 32 | source), TABLE_EMPTY if free
    ctrl: np.ndarray  # int64 [count]
    mask: int
    limit: int


@njit(nogil=True, cache=True)
def _slot(st, v):
    return np.int64(mix64(np.uint64(v)) & np.uint64(st.mask))


@njit(nogil=True, cache=True)
def table_insert(st, v, s):
    """1 if (v, s) was added, 0 if present, -1 if the table is over its limit."""
    key = (np.int64(v) << 32) | np.int64(s)
    i = _slot(st, v)
    for _ in range(st.keys.shape[0]):
        k = st.keys[i]
        if k == key:
            return 0
        if k == TABLE_EMPTY:
            if cas(st.keys, i, TABLE_EMPTY, key):
                if fetch_add(st.ctrl, 0, 1) + 1 > st.limit:
                    return -1
                return 1
            if st.keys[i] == key:
                return 0
        i = (i + 1) & st.mask
    return -1


@njit(nogil=True, cache=True)
def table_contains(st, v, s):
    key = (np.int64(v) << 32) | np.int64(s)
    i = _slot(st, v)
    for _ in range(st.keys.shape[0]):
        k = st.keys[i]
        if k == key:
            return True
        if k == TABLE_EMPTY:
            return False
        i = (i + 1) & st.mask
    return False


@njit(nogil=True, cache=True)
def table_sources(st, v, out):
    """Write the sources paired with ``v`` into ``out``; returns their count."""
    i = _slot(st, v)
    c = 0
    for _ in range(st.keys.shape[0]):
        k = st.keys[i]
        if k == TABLE_EMPTY:
            break
        if (k >> 32) == v:
            out[c] = k & 0xFFFFFFFF
            c += 1
        i = (i + 1) & st.mask
    return c


@njit(nogil=True, cache=True)
def _insert_pairs(st, vs, ss, status):
    for j in range(vs.shape[0]):
        if table_insert(st, vs[j], ss[j]) < 0:
            status[0] = ST_TABLE_FULL
            return


class ReachPairTable:
    """Phase-concurrent open-addressing set of (vertex, source) pairs."""

    def __init__(self, capacity: int):
        cap = 64
        while cap < capacity:
            cap *= 2
        self.state = TableState(
            keys=np.full(cap, TABLE_EMPTY, np.int64),
            ctrl=np.zeros(1, np.int64),
            mask=cap - 1,
            limit=int(cap * TABLE_LOAD),
        )

    @classmethod
    def for_pairs(cls, expected: int) -> ReachPairTable:
        return cls(int(np.ceil(expected / TABLE_LOAD)) + 1)

    @property
    def capacity(self) -> int:
        return self.state.keys.shape[0]

    def __len__(self) -> int:
        return int(min(self.state.ctrl[0], self.state.limit))

    def clear(self) -> None:
        self.state.keys[:] = TABLE_EMPTY
        self.state.ctrl[:] = 0

    def insert(self, v: int, s: int) -> bool:
        r = table_insert(self.state, np.int64(v), np.int64(s))
        if r < 0:
            raise TableOverflowError(f"pair table over its limit of {self.state.limit}")
        return bool(r)

    def insert_many(self, vertices, sources) -> None:
        status = np.zeros(1, np.int64)
        _insert_pairs(self.state, np.asarray(vertices, np.int64), np.asarray(sources, np.int64), status)
        if status[0] != ST_OK:
            raise TableOverflowError(f"pair table over its limit of {self.state.limit}")

    def __contains__(self, pair) -> bool:
        v, s = pair
        return bool(table_contains(self.state, np.int64(v), np.int64(s)))

    def sources_of(self, v: int) -> np.ndarray:
        out = np.empty(max(len(self), 1), np.int64)
        c = table_sources(self.state, np.int64(v), out)
        return np.sort(out[:c])

    def pairs(self) -> np.ndarray:
        """All pairs as an ``(k, 2)`` array of (vertex, source)."""
        keys = self.state.keys
        keys = keys[keys != TABLE_EMPTY]
        return np.stack([keys >> 32, keys & 0xFFFFFFFF], axis=1)


# ---------------------------------------------------------------------------
# frontier helpers


def split_frontier(frontier: np.ndarray, offsets: np.ndarray, tau: int, block: int = EDGE_BLOCK):
    """Light vertices (degree < tau) and edge blocks ``(vertex, lo, hi)`` of the rest."""
    deg = offsets[frontier + 1] - offsets[frontier]
    heavy = deg >= tau
    light = frontier[~heavy]
    if not heavy.any():
        empty = np.zeros(0, np.int64)
        return light, empty, empty, empty
    hv = frontier[heavy]
    nblocks = (deg[heavy] + block - 1) // block
    hv_rep = np.repeat(hv, nblocks)
    first = np.cumsum(nblocks) - nblocks
    within = np.arange(hv_rep.size, dtype=np.int64) - np.repeat(first, nblocks)
    lo = offsets[hv_rep] + within * block
    hi = np.minimum(lo + block, offsets[hv_rep + 1])
    return light, hv_rep, lo, hi


def choose_mode(frontier: np.ndarray, offsets: np.ndarray, m: int, theta: float, forced: str = "auto") -> str:
    """Dense when the frontier's out-degree sum exceeds ``m / theta``."""
    if forced != "auto":
        return forced
    if frontier.size == 0 or m == 0:
        return SPARSE
    work = int((offsets[frontier + 1] - offsets[frontier]).sum()) + frontier.size
    return DENSE if work > m / theta else SPARSE


def maybe_densify(frontier: np.ndarray, g: Graph, theta: float = 20.0) -> str:
    return choose_mode(np.asarray(frontier, np.int64), g.offsets, g.m, theta)


# ---------------------------------------------------------------------------
# single-source style kernels (also used by LDD with labels and parents)


@njit(nogil=True, cache=True)
def _visit(u, x, visit, label, parent):
    if visit[u] != 0 or not cas(visit, u, 0, 1):
        return False
    if parent.shape[0] > 0:
        parent[u] = x
        label[u] = label[x]
    return True


@njit(nogil=True, cache=True)
def _local_search_single(v, offsets, targets, edge_ok, tau, visit, label, parent,
                         bag, rng, worker, queue, status):
    queue[0] = v
    head = 0
    tl = 1
    t = 0
    masked = edge_ok.shape[0] > 0
    while head < tl:
        x = queue[head]
        e = offsets[x]
        end = offsets[x + 1]
        while e < end and t < tau:
            u = targets[e]
            ok = not masked or edge_ok[e] != 0
            e += 1
            t += 1
            if ok and _visit(u, x, visit, label, parent):
                queue[tl] = u
                tl += 1
        if e < end:
            break  # budget ran out inside x's list: x itself is flushed
        head += 1
        if t >= tau:
            break
    for j in range(head, tl):
        if bag_insert(bag, queue[j], rng, worker, -1) != OK:
            status[0] = ST_BAG_FULL


@njit(nogil=True, cache=True)
def _sparse_single(worker, nworkers, cursor, offsets, targets, edge_ok, light, hv, hlo, hhi,
                   tau, visit, label, parent, bag, rng, queues, status):
    nl = light.shape[0]
    total = nl + hv.shape[0]
    queue = queues[worker]
    masked = edge_ok.shape[0] > 0
    while True:
        start, end = claim(cursor, 16, total)
        if start >= total:
            return
        for j in range(start, end):
            if j < nl:
                _local_search_single(light[j], offsets, targets, edge_ok, tau, visit, label,
                                     parent, bag, rng, worker, queue, status)
            else:
                h = j - nl
                x = hv[h]
                for e in range(hlo[h], hhi[h]):
                    if masked and edge_ok[e] == 0:
                        continue
                    u = targets[e]
                    if _visit(u, x, visit, label, parent):
                        if bag_insert(bag, u, rng, worker, -1) != OK:
                            status[0] = ST_BAG_FULL


@njit(nogil=True, cache=True)
def _dense_single(worker, nworkers, cursor, n, rev_offsets, rev_targets, rev_edge_ok,
                  in_frontier, visit, label, parent, bag, rng, status):
    masked = rev_edge_ok.shape[0] > 0
    while True:
        start, end = claim(cursor, 512, n)
        if start >= n:
            return
        for u in range(start, end):
            if visit[u] != 0:
                continue
            for e in range(rev_offsets[u], rev_offsets[u + 1]):
                if masked and rev_edge_ok[e] == 0:
                    continue
                x = rev_targets[e]
                if in_frontier[x] != 0:
                    visit[u] = 1
                    if parent.shape[0] > 0:
                        parent[u] = x
                        label[u] = label[x]
                    if bag_insert(bag, u, rng, worker, -1) != OK:
                        status[0] = ST_BAG_FULL
                    break


_NO_I64 = np.zeros(0, np.int64)
_NO_U8 = np.zeros(0, np.uint8)


class FrontierSearch:
    """Round-by-round driver for single-source style traversals.

    With ``label``/``parent`` arrays a newly reached vertex copies its
    discoverer's label and records it as parent (LDD clustering). ``edge_ok``
    masks CSR edge slots out of the traversal.
    """

    def __init__(self, g: Graph, params: Params, visit: np.ndarray | None = None,
                 label: np.ndarray | None = None, parent: np.ndarray | None = None,
                 edge_ok: np.ndarray | None = None):
        self.g = g
        self.params = params
        self.pool = get_pool(params.nthreads)
        self.tau = params.tau
        self.visit = np.zeros(g.n, np.uint8) if visit is None else visit
        self.label = _NO_I64 if label is None else label
        self.parent = _NO_I64 if parent is None else parent
        self.edge_ok = _NO_U8 if edge_ok is None else edge_ok
        self.rev_edge_ok = self.edge_ok
        if self.edge_ok.size and not g.symmetric:
            raise GraphError("edge masks are only supported on symmetric graphs")
        self._rev = None
        self.bag = HashBag(g.n, params.lam, params.sigma, params.alpha, params.kappa, seed=params.seed)
        self.rng = worker_streams(params.seed, self.pool.threads)
        self.queues = np.empty((self.pool.threads, self.tau + 1), np.int64)
        self.in_frontier = None
        self.status = np.zeros(1, np.int64)
        self.rounds = 0
        self.stats: list[RoundStat] = []

    def expand(self, frontier: np.ndarray, mode: str | None = None) -> np.ndarray:
        """Process one frontier; returns the next one."""
        g = self.g
        if mode is None:
            mode = choose_mode(frontier, g.offsets, g.m, self.params.theta, self.params.mode)
        self.rounds += 1
        self.stats.append(RoundStat(int(frontier.size), mode))
        if mode == DENSE:
            if self._rev is None:
                self._rev = g.reverse
                self.in_frontier = np.zeros(g.n, np.uint8)
            rev = self._rev
            self.in_frontier[frontier] = 1
            self.pool.run(_dense_single, g.n, g.n, rev.offsets, rev.targets, self.rev_edge_ok,
                          self.in_frontier, self.visit, self.label, self.parent,
                          self.bag.state, self.rng, self.status)
            self.in_frontier[frontier] = 0
        else:
            light, hv, hlo, hhi = split_frontier(frontier, g.offsets, self.tau)
            self.pool.run(_sparse_single, light.size + hv.size, g.offsets, g.targets, self.edge_ok,
                          light, hv, hlo, hhi, self.tau, self.visit, self.label, self.parent,
                          self.bag.state, self.rng, self.queues, self.status)
        if self.status[0] != ST_OK:
            raise BagFullError("frontier bag overflowed its vertex-count bound")
        return self.bag.extract_all()


def single_reach(g: Graph, src: int, visit: np.ndarray | None = None,
                 params: Params | None = None) -> ReachResult:
    """Mark every vertex reachable from ``src``.

    ``visit`` may carry preset flags (those vertices are treated as already
    reached and block the search); it is updated in place.
    """
    params = params or Params()
    if not 0 <= src < g.n:
        raise GraphError(f"source {src} out of range [0, {g.n})")
    if visit is None:
        visit = np.zeros(g.n, np.uint8)
    search = FrontierSearch(g, params, visit=visit)
    visit[src] = 1
    frontier = np.array([src], np.int64)
    while frontier.size:
        frontier = search.expand(frontier)
    return ReachResult(visit.astype(bool), search.rounds, search.stats)


# ---------------------------------------------------------------------------
# multi-source kernels


@njit(nogil=True, cache=True)
def _relax_pairs(u, srcs, ns, table):
    """Pair ``u`` with each listed source; 1 if any pair was new, -1 on overflow."""
    new = 0
    for j in range(ns):
        r = table_insert(table, u, srcs[j])
        if r < 0:
            return -1
        if r == 1:
            new = 1
    return new


@njit(nogil=True, cache=True)
def _local_search_multi(v, offsets, targets, tau, label, done, pending, table,
                        bag, rng, worker, queue, srcs, status):
    queue[0] = v
    head = 0
    tl = 1
    t = 0
    partial = False
    while head < tl:
        x = queue[head]
        if head > 0:
            cas(pending, x, 1, 0)  # must precede reading x's sources
        ns = table_sources(table, x, srcs)
        lx = label[x]
        e = offsets[x]
        end = offsets[x + 1]
        while e < end and t < tau:
            u = targets[e]
            e += 1
            t += 1
            if done[u] != 0 or label[u] != lx:
                continue
            r = _relax_pairs(u, srcs, ns, table)
            if r < 0:
                status[0] = ST_TABLE_FULL
                return
            if r == 1 and pending[u] == 0 and cas(pending, u, 0, 1):
                queue[tl] = u
                tl += 1
        if e < end:
            partial = True
            break
        head += 1
        if t >= tau:
            break
    for j in range(head, tl):
        w = queue[j]
        if j == head and partial and not cas(pending, w, 0, 1):
            continue  # someone else already rescheduled w
        if bag_insert(bag, w, rng, worker, -1) != OK:
            status[0] = ST_BAG_FULL


@njit(nogil=True, cache=True)
def _sparse_multi(worker, nworkers, cursor, offsets, targets, light, hv, hlo, hhi, tau,
                  label, done, pending, table, bag, rng, queues, srcbufs, status):
    nl = light.shape[0]
    total = nl + hv.shape[0]
    queue = queues[worker]
    srcs = srcbufs[worker]
    while True:
        start, end = claim(cursor, 8, total)
        if start >= total or status[0] != ST_OK:
            return
        for j in range(start, end):
            if j < nl:
                _local_search_multi(light[j], offsets, targets, tau, label, done, pending,
                                    table, bag, rng, worker, queue, srcs, status)
            else:
                h = j - nl
                x = hv[h]
                ns = table_sources(table, x, srcs)
                lx = label[x]
                for e in range(hlo[h], hhi[h]):
                    u = targets[e]
                    if done[u] != 0 or label[u] != lx:
                        continue
                    r = _relax_pairs(u, srcs, ns, table)
                    if r < 0:
                        status[0] = ST_TABLE_FULL
                        return
                    if r == 1 and pending[u] == 0 and cas(pending, u, 0, 1):
                        if bag_insert(bag, u, rng, worker, -1) != OK:
                            status[0] = ST_BAG_FULL


@njit(nogil=True, cache=True)
def _dense_multi(worker, nworkers, cursor, n, rev_offsets, rev_targets, in_frontier,
                 label, done, pending, table, bag, rng, srcbufs, status):
    srcs = srcbufs[worker]
    while True:
        start, end = claim(cursor, 256, n)
        if start >= n or status[0] != ST_OK:
            return
        for u in range(start, end):
            if done[u] != 0:
                continue
            lu = label[u]
            new = 0
            for e in range(rev_offsets[u], rev_offsets[u + 1]):
                x = rev_targets[e]
                if in_frontier[x] == 0 or label[x] != lu:
                    continue
                ns = table_sources(table, x, srcs)
                r = _relax_pairs(u, srcs, ns, table)
                if r < 0:
                    status[0] = ST_TABLE_FULL
                    return
                if r == 1:
                    new = 1
            if new == 1 and pending[u] == 0 and cas(pending, u, 0, 1):
                if bag_insert(bag, u, rng, worker, -1) != OK:
                    status[0] = ST_BAG_FULL


class MultiReachWorkspace:
    """Buffers reused by every multi-source search over one graph."""

    def __init__(self, g: Graph, params: Params):
        self.params = params
        self.pool = get_pool(params.nthreads)
        self.pending = np.zeros(g.n, np.uint8)
        self.in_frontier = np.zeros(g.n, np.uint8)
        self.bag = HashBag(g.n, params.lam, params.sigma, params.alpha, params.kappa, seed=params.seed)
        self.rng = worker_streams(params.seed, self.pool.threads)
        self.queues = np.empty((self.pool.threads, params.tau + 1), np.int64)
        self.srcbufs = np.empty((self.pool.threads, 1), np.int64)

    def source_buffers(self, nsources: int) -> np.ndarray:
        if self.srcbufs.shape[1] < nsources:
            self.srcbufs = np.empty((self.pool.threads, nsources), np.int64)
        return self.srcbufs


@dataclass
class MultiReachResult:
    rounds: int
    pairs: int
    stats: list[RoundStat] = field(default_factory=list)


def multi_reach(g: Graph, sources, labels: np.ndarray, done: np.ndarray, table: ReachPairTable,
                params: Params | None = None, workspace: MultiReachWorkspace | None = None) -> MultiReachResult:
    """Fill ``table`` with every (v, s) such that source s reaches v.

    ``sources`` is an ``(k, 2)`` array of (vertex, source label). Only edges whose
    endpoints share a label in ``labels`` are followed and vertices with
    ``done`` set are never entered. Raises :class:`TableOverflowError` when the
    table passes its load limit; the caller resizes and reruns.
    """
    params = params or Params()
    ws = workspace or MultiReachWorkspace(g, params)
    pool = ws.pool
    tau = params.tau
    sources = np.asarray(sources, np.int64).reshape(-1, 2)
    status = np.zeros(1, np.int64)
    stats: list[RoundStat] = []
    table.insert_many(sources[:, 0], sources[:, 1])
    frontier = np.unique(sources[:, 0])
    srcbufs = ws.source_buffers(max(int(np.unique(sources[:, 1]).size), 1))
    rev = None
    try:
        while frontier.size:
            ws.pending[frontier] = 0
            mode = choose_mode(frontier, g.offsets, g.m, params.theta, params.mode)
            stats.append(RoundStat(int(frontier.size), mode))
            if mode == DENSE:
                if rev is None:
                    rev = g.reverse
                ws.in_frontier[frontier] = 1
                pool.run(_dense_multi, g.n, g.n, rev.offsets, rev.targets, ws.in_frontier,
                         labels, done, ws.pending, table.state, ws.bag.state, ws.rng, srcbufs, status)
                ws.in_frontier[frontier] = 0
            else:
                light, hv, hlo, hhi = split_frontier(frontier, g.offsets, tau)
                pool.run(_sparse_multi, light.size + hv.size, g.offsets, g.targets, light, hv, hlo,
                         hhi, tau, labels, done, ws.pending, table.state, ws.bag.state, ws.rng,
                         ws.queues, srcbufs, status)
            frontier = ws.bag.extract_all()
            if status[0] == ST_TABLE_FULL:
                raise TableOverflowError(f"pair table over its limit of {table.state.limit}")
            if status[0] == ST_BAG_FULL:
                raise BagFullError("frontier bag overflowed its vertex-count bound")
    except (TableOverflowError, BagFullError):
        ws.bag.reset()
        ws.pending[:] = 0
        ws.in_frontier[:] = 0
        raise
    return MultiReachResult(len(stats), len(table), stats)
