"""Fork-join execution of nogil numba kernels on a Python thread pool.

A kernel has the signature ``kernel(worker, nworkers, cursor, *args)``. Workers
claim blocks of the iteration space by ``fetch_add`` on the shared ``cursor``
array, so uneven blocks balance themselves across threads. ``Pool.run``
returns only after every worker finished, which is the round barrier.
"""
import os
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .atomics import fetch_add

THREADS_ENV = "CONCUR_GRAPH_THREADS"

# iteration counts below this run inline on the caller (horizontal coarsening)
INLINE_BELOW = 256

_pools: dict[int, "Pool"] = {}
_pools_lock = threading.Lock()


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


class Pool:
    def __init__(self, threads: int):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self._executor = ThreadPoolExecutor(threads - 1) if threads > 1 else None

    def run(self, kernel, work: int, *args) -> None:
        """Run ``kernel`` on all workers over ``work`` items and wait."""
        cursor = np.zeros(1, np.int64)
        if self._executor is None or work < INLINE_BELOW:
            kernel(0, 1, cursor, *args)
            return
        futures = [
            self._executor.submit(kernel, w, self.threads, cursor, *args)
            for w in range(1, self.threads)
        ]
        kernel(0, self.threads, cursor, *args)
        for f in futures:
            f.result()

    def run_all(self, kernel, *args) -> None:
        """Run ``kernel`` once per worker regardless of the amount of work."""
        cursor = np.zeros(1, np.int64)
        if self._executor is None:
            kernel(0, 1, cursor, *args)
            return
        futures = [
            self._executor.submit(kernel, w, self.threads, cursor, *args)
            for w in range(1, self.threads)
        ]
        kernel(0, self.threads, cursor, *args)
        for f in futures:
            f.result()


def get_pool(threads: int | None = None) -> Pool:
    threads = threads or default_threads()
    with _pools_lock:
        pool = _pools.get(threads)
        if pool is None:
            pool = _pools[threads] = Pool(threads)
        return pool


@njit(nogil=True, cache=True)
def claim(cursor, grain, total):
    """Claim the next block ``[start, end)``; ``start >= total`` means done."""
    start = fetch_add(cursor, 0, grain)
    end = start + grain
    if end > total:
        end = total
    return start, end


@njit(nogil=True, cache=True)
def mix64(x):
    """splitmix64 finalizer on a uint64."""
    x = np.uint64(x)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@njit(nogil=True, cache=True)
def next_random(rng, worker):
    """Advance the worker's splitmix64 stream in ``rng[worker]``."""
    s = np.uint64(rng[worker]) + np.uint64(0x9E3779B97F4A7C15)
    rng[worker] = np.int64(s)
    return mix64(s)


def worker_streams(seed: int, threads: int) -> np.ndarray:
    """One RNG state per worker, derived from the global seed and worker index."""
    base = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    states = [mix64(base ^ mix64(np.uint64(w + 1))) for w in range(max(threads, 1))]
    return np.array(states, dtype=np.uint64).view(np.int64)
