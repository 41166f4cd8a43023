"""Strongly connected components by batched multi-source reachability.

Outline: trim vertices with no in- or out-edges, peel the SCC of one pivot
with a forward and a backward single-source search, then feed the remaining
vertices as sources in batches of growing size. For each batch a forward and a
backward multi-source search fill two pair tables. A vertex that shares a
source with both tables is in that source's SCC and is finished; every other
touched vertex folds the two source sets into its label. Searches never cross
an edge whose endpoints carry different labels, so later batches only work
inside the classes that are still undecided.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .atomics import atomic_max, fetch_add
from .config import Params, batch_bounds
from .generators import rng_for
from .graph import Graph
from .parallel import claim, get_pool, mix64
from .reach import (TABLE_EMPTY, MultiReachWorkspace, ReachPairTable, TableOverflowError,
                    multi_reach, single_reach, table_contains)

PHASES = ("trimming", "first_scc", "multi_search", "table_resize", "labeling")
PIVOTS = ("maxdeg", "random")

TOP_BIT = np.int64(-(1 << 63))
UNDECIDED = -1
_SALT_IN = np.uint64(0x243F6A8885A308D3)
_SALT_OUT = np.uint64(0x13198A2E03707344)
_ZERO = np.int64(0)
_ONE = np.int64(1)


@dataclass
class SccLabels:
    """Finished vertices carry the id of a member of their SCC. Undecided ones
    start in one shared class (UNDECIDED) and later carry hashed labels with the
    top bit set, so they can never equal a vertex id."""

    label: np.ndarray  # int64
    done: np.ndarray  # uint8

    @classmethod
    def fresh(cls, n: int) -> SccLabels:
        return cls(np.full(n, UNDECIDED, np.int64), np.zeros(n, np.uint8))

    @property
    def alive(self) -> np.ndarray:
        return np.flatnonzero(self.done == 0)


@dataclass
class SccResult:
    labels: SccLabels
    pivot: int
    first_size: int
    timings: dict = field(default_factory=dict)
    rounds: dict = field(default_factory=dict)
    trimmed: int = 0
    batches: int = 0
    table_retries: int = 0

    @property
    def label(self) -> np.ndarray:
        return self.labels.label

    def components(self) -> np.ndarray:
        """Dense component ids, numbered by smallest member."""
        _, first, inv = np.unique(self.labels.label, return_index=True, return_inverse=True)
        return np.argsort(np.argsort(first))[inv.ravel()].astype(np.int64)

    @property
    def count(self) -> int:
        return int(np.unique(self.labels.label).size)

    @property
    def largest(self) -> int:
        if self.labels.label.size == 0:
            return 0
        return int(np.unique(self.labels.label, return_counts=True)[1].max())


# ---------------------------------------------------------------------------
# signature hashing


@njit(nogil=True, cache=True)
def source_mix(s, salt):
    return np.int64(mix64(np.uint64(s) + salt))


@njit(nogil=True, cache=True)
def combine_signature(old, sig_in, n_in, sig_out, n_out):
    """New label from an old label and the folded in/out source sums."""
    if n_in == 0 and n_out == 0:
        return old
    h = mix64(np.uint64(old) ^ _SALT_IN)
    h = mix64(h + np.uint64(sig_in) + np.uint64(n_in))
    h = mix64(h ^ (np.uint64(sig_out) + np.uint64(n_out) * _SALT_OUT))
    return np.int64(h) | TOP_BIT


def fold_sources(sources, salt) -> tuple[int, int]:
    """Wrapping sum of per-source mixes (as a signed 64-bit value) and the count."""
    acc = 0
    for s in sources:
        acc = (acc + int(source_mix(np.int64(s), salt))) & 0xFFFFFFFFFFFFFFFF
    return int(np.uint64(acc).astype(np.int64)), len(sources)


def signature_hash(old_label: int, in_sources, out_sources) -> int:
    """Order-independent label for a vertex reached by the given source sets."""
    in_sources = list(in_sources)
    out_sources = list(out_sources)
    sin, nin = fold_sources(in_sources, _SALT_IN)
    sout, nout = fold_sources(out_sources, _SALT_OUT)
    return int(combine_signature(np.int64(old_label), np.int64(sin), np.int64(nin),
                                 np.int64(sout), np.int64(nout)))


# ---------------------------------------------------------------------------
# phases


def trim(g: Graph, labels: SccLabels) -> int:
    """One pass: alive vertices without alive in- or out-neighbours become singletons."""
    alive = labels.done == 0
    src = np.repeat(np.arange(g.n), np.diff(g.offsets))
    keep = alive[src] & alive[g.targets]
    out_deg = np.bincount(src[keep], minlength=g.n)
    in_deg = np.bincount(g.targets[keep], minlength=g.n)
    hit = alive & ((out_deg == 0) | (in_deg == 0))
    labels.done[hit] = 1
    labels.label[hit] = np.flatnonzero(hit)
    return int(hit.sum())


def pick_pivot(g: Graph, labels: SccLabels, how: str = "maxdeg", seed: int = 0) -> int:
    alive = labels.alive
    if alive.size == 0:
        return -1
    if how == "random":
        return int(alive[rng_for(seed).integers(alive.size)])
    if how != "maxdeg":
        raise ValueError(f"pivot must be one of {PIVOTS}, got {how!r}")
    out_deg = np.diff(g.offsets)[alive]
    in_deg = np.diff(g.reverse.offsets)[alive]
    score = out_deg * in_deg
    best = alive[score == score.max()]
    # lattices tie everywhere; a seeded pick avoids always taking the corner
    return int(best[rng_for(seed).integers(best.size)])


def first_scc(g: Graph, labels: SccLabels, params: Params, pivot: int) -> tuple[int, int, int]:
    """Peel the pivot's SCC. Returns its size and the forward/backward round counts."""
    fw = single_reach(g, pivot, labels.done.copy(), params)
    bw = single_reach(g.reverse, pivot, labels.done.copy(), params)
    alive = labels.done == 0
    fwd = fw.visited & alive
    bwd = bw.visited & alive
    both = fwd & bwd
    labels.label[both] = pivot
    labels.done[both] = 1
    mix_fw = source_mix(np.int64(pivot), _SALT_OUT)
    mix_bw = source_mix(np.int64(pivot), _SALT_IN)
    for v in np.flatnonzero(fwd ^ bwd).tolist():
        if fwd[v]:
            labels.label[v] = combine_signature(labels.label[v], _ZERO, _ZERO, mix_fw, _ONE)
        else:
            labels.label[v] = combine_signature(labels.label[v], mix_bw, _ONE, _ZERO, _ZERO)
    return int(both.sum()), fw.rounds, bw.rounds


@njit(nogil=True, cache=True)
def _fold_table(worker, nworkers, cursor, keys, other, salt, sig, cnt, common):
    total = keys.shape[0]
    check = common.shape[0] > 0
    while True:
        start, end = claim(cursor, 1024, total)
        if start >= total:
            return
        for i in range(start, end):
            k = keys[i]
            if k == TABLE_EMPTY:
                continue
            v = k >> 32
            s = k & 0xFFFFFFFF
            fetch_add(sig, v, source_mix(s, salt))
            fetch_add(cnt, v, 1)
            if check and table_contains(other, v, s):
                atomic_max(common, v, s)


@njit(nogil=True, cache=True)
def _relabel(worker, nworkers, cursor, label, done, sig_in, n_in, sig_out, n_out, common):
    total = label.shape[0]
    while True:
        start, end = claim(cursor, 1024, total)
        if start >= total:
            return
        for v in range(start, end):
            if done[v] != 0:
                continue
            if common[v] >= 0:
                label[v] = common[v]
                done[v] = 1
            elif n_in[v] != 0 or n_out[v] != 0:
                label[v] = combine_signature(label[v], sig_in[v], n_in[v], sig_out[v], n_out[v])


def _next_pow2(x: int) -> int:
    return 1 << max(int(x) - 1, 1).bit_length()


def run_scc(g: Graph, params: Params | None = None, pivot: str = "maxdeg") -> SccResult:
    params = params or Params()
    pool = get_pool(params.nthreads)
    timings = dict.fromkeys(PHASES, 0.0)
    labels = SccLabels.fresh(g.n)
    rev = g.reverse

    t0 = time.perf_counter()
    trimmed = trim(g, labels)
    timings["trimming"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    p = pick_pivot(g, labels, pivot, params.seed)
    first_size, fw_rounds, bw_rounds = (0, 0, 0) if p < 0 else first_scc(g, labels, params, p)
    timings["first_scc"] = time.perf_counter() - t0

    order = labels.alive
    order = order[rng_for(params.seed).permutation(order.size)]
    bounds = batch_bounds(order.size, params.beta)
    ws = MultiReachWorkspace(g, params)
    sig_in = np.zeros(g.n, np.int64)
    sig_out = np.zeros(g.n, np.int64)
    n_in = np.zeros(g.n, np.int64)
    n_out = np.zeros(g.n, np.int64)
    common = np.full(g.n, -1, np.int64)
    prev_pairs = 0
    retries = 0
    multi_rounds = []
    batches = 0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        batch = order[lo:hi]
        batch = batch[labels.done[batch] == 0]
        if batch.size == 0:
            continue
        batches += 1
        srcs = np.stack([batch, batch], axis=1)
        cap = _next_pow2(max(4 * batch.size, 2 * prev_pairs, 64))
        while True:
            fwt = ReachPairTable(cap)
            bwt = ReachPairTable(cap)
            t0 = time.perf_counter()
            try:
                rf = multi_reach(g, srcs, labels.label, labels.done, fwt, params, ws)
                rb = multi_reach(rev, srcs, labels.label, labels.done, bwt, params, ws)
                timings["multi_search"] += time.perf_counter() - t0
                break
            except TableOverflowError:
                timings["table_resize"] += time.perf_counter() - t0
                retries += 1
                cap *= 2
        multi_rounds.append((rf.rounds, rb.rounds))
        prev_pairs = max(len(fwt), len(bwt))

        t0 = time.perf_counter()
        sig_in[:] = 0
        sig_out[:] = 0
        n_in[:] = 0
        n_out[:] = 0
        common[:] = -1
        # forward table: sources that reach v; backward: sources v reaches
        pool.run(_fold_table, fwt.capacity, fwt.state.keys, bwt.state, _SALT_OUT, sig_out, n_out, common)
        pool.run(_fold_table, bwt.capacity, bwt.state.keys, bwt.state, _SALT_IN, sig_in, n_in, common[:0])
        pool.run(_relabel, g.n, labels.label, labels.done, sig_in, n_in, sig_out, n_out, common)
        timings["labeling"] += time.perf_counter() - t0

    rounds = {
        "first_scc_forward": fw_rounds,
        "first_scc_backward": bw_rounds,
        "multi_search": [list(r) for r in multi_rounds],
    }
    return SccResult(labels, p, first_size, timings, rounds, trimmed, batches, retries)
