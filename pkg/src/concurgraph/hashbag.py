"""Parallel hash bag: a concurrent unordered container for frontier vertices.

The slot array is split into chunks that double in size (``tail[i]`` is the end
of chunk ``i``). Inserts go to a random slot of the current chunk ``r`` and
linear-probe from there. A fraction ``sigma / (alpha * chunk_size)`` of inserts
bump the chunk's sample counter; once the counter reaches ``sigma`` the chunk is
about ``alpha`` full and ``r`` advances by CAS. Nothing is ever copied, so the
bag needs an upper bound on its total size up front.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numba import njit

from .atomics import atomic_load, cas, fetch_add
from .parallel import claim, get_pool, next_random, worker_streams

EMPTY = -1
OK = 0
FULL = 1

LAMBDA = 1 << 10
SIGMA = 50
ALPHA = 0.5
KAPPA = 128

_INV_2_53 = 1.0 / 9007199254740992.0


class BagFullError(RuntimeError):
    """Raised when inserts exceed the bag's declared upper bound."""


class BagState(NamedTuple):
    slots: np.ndarray  # int64, EMPTY or an element
    tail: np.ndarray  # int64, end index of each chunk
    sample: np.ndarray  # int64, sample counter per chunk
    ctrl: np.ndarray  # int64 [r, events written]
    events: np.ndarray  # int64 (k, 3): old r, insert ticket, worker at each resize
    sigma: int
    kappa: int
    alpha: float


def chunk_tails(upper_bound: int, lam: int = LAMBDA, alpha: float = ALPHA) -> np.ndarray:
    need = int(np.ceil(upper_bound / alpha)) + lam
    tails = [lam]
    while tails[-1] < need:
        tails.append(tails[-1] * 2)
    return np.array(tails, np.int64)


@njit(nogil=True, cache=True)
def _try_resize(st, r, ticket, worker):
    if r + 1 < st.tail.shape[0] and cas(st.ctrl, 0, r, r + 1):
        k = fetch_add(st.ctrl, 1, 1)
        if k < st.events.shape[0]:
            st.events[k, 0] = r
            st.events[k, 1] = ticket
            st.events[k, 2] = worker


@njit(nogil=True, cache=True)
def bag_insert(st, value, rng, worker, ticket):
    """Insert ``value``; returns OK, or FULL when the last chunk has no room."""
    nchunks = st.tail.shape[0]
    while True:
        r = atomic_load(st.ctrl, 0)
        lo = 0 if r == 0 else st.tail[r - 1]
        hi = st.tail[r]
        k = hi - lo
        last = r == nchunks - 1
        x = next_random(rng, worker)
        if not last:
            # high 53 bits decide sampling, the low bits pick the slot
            u = np.float64(x >> np.uint64(11)) * _INV_2_53
            if u * st.alpha * k < st.sigma:
                resize = True
                for _ in range(st.sigma):
                    t = st.sample[r]
                    if t >= st.sigma:
                        break
                    if cas(st.sample, r, t, t + 1):
                        resize = t + 1 >= st.sigma
                        break
                if resize:
                    _try_resize(st, r, ticket, worker)
                    continue
        i = lo + np.int64(x % np.uint64(k))
        probes = 0
        retry = False
        while True:
            if st.slots[i] == EMPTY and cas(st.slots, i, EMPTY, value):
                return OK
            i += 1
            if i == hi:
                i = lo
            probes += 1
            if last:
                if probes >= k:
                    return FULL
            elif probes > st.kappa:
                _try_resize(st, r, ticket, worker)
                retry = True
                break
        if retry:
            continue


@njit(nogil=True, cache=True)
def _insert_kernel(worker, nworkers, cursor, st, values, rng, status):
    total = values.shape[0]
    while True:
        start, end = claim(cursor, 256, total)
        if start >= total:
            return
        for j in range(start, end):
            if bag_insert(st, values[j], rng, worker, j) != OK:
                status[0] = FULL
                return


@njit(nogil=True, cache=True)
def _pack(slots, end):
    count = 0
    for i in range(end):
        if slots[i] != EMPTY:
            count += 1
    out = np.empty(count, np.int64)
    j = 0
    for i in range(end):
        v = slots[i]
        if v != EMPTY:
            out[j] = v
            j += 1
            slots[i] = EMPTY
    return out


class HashBag:
    """Frontier container holding at most ``upper_bound`` elements per phase.

    ``insert`` and ``insert_many`` may run concurrently with each other; the
    extraction methods need a quiescent bag.
    """

    def __init__(self, upper_bound: int, lam: int = LAMBDA, sigma: int = SIGMA,
                 alpha: float = ALPHA, kappa: int = KAPPA, seed: int = 0):
        if upper_bound < 0:
            raise ValueError("upper_bound must be non-negative")
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        if lam < 1 or sigma < 1 or kappa < 1:
            raise ValueError("lambda, sigma and kappa must be positive")
        self.upper_bound = upper_bound
        self.lam = lam
        self.seed = seed
        tail = chunk_tails(upper_bound, lam, alpha)
        self.state = BagState(
            slots=np.full(int(tail[-1]), EMPTY, np.int64),
            tail=tail,
            sample=np.zeros(tail.size, np.int64),
            ctrl=np.zeros(2, np.int64),
            events=np.zeros((tail.size + 1, 3), np.int64),
            sigma=sigma,
            kappa=kappa,
            alpha=float(alpha),
        )
        self._rng = worker_streams(seed, 1)

    @property
    def capacity(self) -> int:
        return int(self.state.tail[-1])

    @property
    def tail(self) -> np.ndarray:
        return self.state.tail

    @property
    def r(self) -> int:
        return int(self.state.ctrl[0])

    @property
    def used_range(self) -> int:
        """End of the current chunk: every element sits below this index."""
        return int(self.state.tail[self.r])

    def resize_events(self) -> np.ndarray:
        k = min(int(self.state.ctrl[1]), self.state.events.shape[0])
        return self.state.events[:k].copy()

    def insert(self, v: int) -> None:
        if bag_insert(self.state, np.int64(v), self._rng, 0, -1) != OK:
            raise BagFullError(f"hash bag full: more than {self.upper_bound} elements inserted")

    def insert_many(self, values, threads: int | None = None, seed: int | None = None) -> None:
        """Insert distinct ``values`` from all pool workers concurrently."""
        values = np.ascontiguousarray(values, dtype=np.int64)
        pool = get_pool(threads)
        rng = worker_streams(self.seed if seed is None else seed, pool.threads)
        status = np.zeros(1, np.int64)
        pool.run_all(_insert_kernel, self.state, values, rng, status)
        if status[0] != OK:
            raise BagFullError(f"hash bag full: more than {self.upper_bound} elements inserted")

    def reset(self) -> None:
        st = self.state
        st.slots[: self.used_range] = EMPTY
        st.sample[:] = 0
        st.ctrl[:] = 0

    def extract_all(self) -> np.ndarray:
        """Pack the elements into an array and leave the bag empty with r = 0."""
        st = self.state
        out = _pack(st.slots, self.used_range)
        st.sample[: self.r + 1] = 0
        st.ctrl[:] = 0
        return out

    def for_all(self, f) -> None:
        seg = self.state.slots[: self.used_range]
        for v in seg[seg != EMPTY].tolist():
            f(v)

    def __len__(self) -> int:
        seg = self.state.slots[: self.used_range]
        return int(np.count_nonzero(seg != EMPTY))
