"""Immutable compressed-sparse-row graphs."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VERTEX_DTYPE = np.int32
OFFSET_DTYPE = np.int64


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """CSR graph; neighbours of ``v`` are ``targets[offsets[v]:offsets[v+1]]``.

    ``transpose`` holds the reversed edges of a directed graph. Symmetric graphs
    leave it empty and act as their own transpose.
    """

    n: int
    m: int
    offsets: np.ndarray
    targets: np.ndarray
    transpose: Graph | None = field(default=None, repr=False)
    symmetric: bool = False

    @property
    def reverse(self) -> Graph:
        if self.transpose is not None:
            return self.transpose
        if self.symmetric:
            return self
        raise GraphError("graph has neither a transpose nor a symmetric flag")

    def neighbors(self, v: int) -> np.ndarray:
        _check_vertex(self, v)
        return self.targets[self.offsets[v] : self.offsets[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def edges(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array of (source, target)."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        return np.stack([src, self.targets.astype(np.int64)], axis=1)

    def same_structure(self, other: Graph) -> bool:
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.targets, other.targets)
        )


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range [0, {g.n})")


def out_degree(g: Graph, v: int) -> int:
    _check_vertex(g, v)
    return int(g.offsets[v + 1] - g.offsets[v])


def in_degree(g: Graph, v: int) -> int:
    return out_degree(g.reverse, v)


def _csr_from_pairs(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted, deduplicated, loop-free CSR arrays from validated endpoint arrays."""
    keep = src != dst
    src, dst = src[keep], dst[keep]
    if src.size:
        key = np.unique(src * n + dst)
        src, dst = key // n, key % n
    counts = np.bincount(src, minlength=n)
    offsets = np.zeros(n + 1, OFFSET_DTYPE)
    np.cumsum(counts, out=offsets[1:])
    return offsets, dst.astype(VERTEX_DTYPE)


def _as_pairs(n: int, edges) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    arr = arr.reshape(-1, 2)
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        i = int(np.flatnonzero(bad.any(axis=1))[0])
        u, v = arr[i]
        raise GraphError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
    return arr[:, 0].copy(), arr[:, 1].copy()


def build_csr(n: int, edges, directed: bool = True) -> Graph:
    """Build a graph from ``(u, v)`` pairs, dropping duplicates and self-loops.

    Directed graphs carry their transpose. With ``directed=False`` the pairs are
    taken as undirected and stored in both directions.
    """
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    src, dst = _as_pairs(n, edges)
    if not directed:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        offsets, targets = _csr_from_pairs(n, src, dst)
        return Graph(n, int(targets.size), offsets, targets, symmetric=True)
    offsets, targets = _csr_from_pairs(n, src, dst)
    m = int(targets.size)
    # rebuild from the cleaned edges so both directions agree exactly
    s = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
    t_off, t_tgt = _csr_from_pairs(n, targets.astype(np.int64), s)
    rev = Graph(n, m, t_off, t_tgt)
    g = Graph(n, m, offsets, targets, transpose=rev)
    object.__setattr__(rev, "transpose", g)  # each direction reaches the other
    return g


def from_csr(offsets, targets, directed: bool = True) -> Graph:
    """Wrap existing CSR arrays after validating and canonicalising them."""
    offsets = np.asarray(offsets, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    n = offsets.size - 1
    if n < 0 or offsets[0] != 0 or offsets[-1] != targets.size or np.any(np.diff(offsets) < 0):
        raise GraphError("offsets must start at 0, be non-decreasing and end at m")
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
    return build_csr(n, np.stack([src, targets], axis=1), directed=directed)


def transpose(g: Graph) -> Graph:
    """Graph with every edge reversed (its transpose is ``g`` again)."""
    if g.symmetric:
        return g
    rev = g.reverse
    return Graph(g.n, g.m, rev.offsets, rev.targets, transpose=g)


def symmetrize(g: Graph) -> Graph:
    """Undirected graph holding (u, v) whenever (u, v) or (v, u) is in ``g``."""
    if g.symmetric:
        return g
    e = g.edges()
    return build_csr(g.n, e, directed=False)


def is_symmetric(g: Graph) -> bool:
    if g.symmetric:
        return True
    e = g.edges()
    n = max(g.n, 1)
    fwd = np.sort(e[:, 0] * n + e[:, 1])
    bwd = np.sort(e[:, 1] * n + e[:, 0])
    return bool(np.array_equal(fwd, bwd))
