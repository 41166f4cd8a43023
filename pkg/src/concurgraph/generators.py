"""Synthetic graph generators.

All randomness comes from numpy's Philox4x64 counter-based generator keyed by
the caller's seed, so a spec always yields the same graph on every platform.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import Graph, build_csr


class Scheme(enum.Enum):
    ORIENTED = "oriented"  # SQR / REC
    SAMPLED = "sampled"  # SQR' / REC'


@dataclass(frozen=True)
class LatticeSpec:
    rows: int
    cols: int
    wrap: bool = True
    scheme: Scheme = Scheme.ORIENTED
    p_forward: float = 0.5
    p_backward: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"lattice must be at least 1x1, got {self.rows}x{self.cols}")
        for name in ("p_forward", "p_backward"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")
        total = self.p_forward + self.p_backward
        if self.scheme is Scheme.ORIENTED and abs(total - 1.0) > 1e-12:
            raise ValueError("ORIENTED lattices need p_forward + p_backward == 1")
        if self.scheme is Scheme.SAMPLED and total > 1.0 + 1e-12:
            raise ValueError("SAMPLED lattices need p_forward + p_backward <= 1")


PRESETS = {
    "SQR": dict(rows=10_000, cols=10_000, scheme=Scheme.ORIENTED, p_forward=0.5, p_backward=0.5),
    "REC": dict(rows=1_000, cols=10_000, scheme=Scheme.ORIENTED, p_forward=0.5, p_backward=0.5),
    "SQR'": dict(rows=10_000, cols=10_000, scheme=Scheme.SAMPLED, p_forward=0.3, p_backward=0.3),
    "REC'": dict(rows=1_000, cols=10_000, scheme=Scheme.SAMPLED, p_forward=0.3, p_backward=0.3),
}


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def lattice_pairs(rows: int, cols: int, wrap: bool) -> np.ndarray:
    """Each vertex paired with its right and down neighbour, row-major ids.

    On small tori the same unordered pair can appear twice (e.g. 2 columns);
    every listed pair still gets its own draw.
    """
    r, c = np.divmod(np.arange(rows * cols, dtype=np.int64), cols)
    pairs = []
    for dr, dc in ((0, 1), (1, 0)):
        rr, cc = r + dr, c + dc
        if wrap:
            rr, cc = rr % rows, cc % cols
            keep = np.ones(r.size, bool)
        else:
            keep = (rr < rows) & (cc < cols)
        u = (r * cols + c)[keep]
        v = (rr * cols + cc)[keep]
        nonloop = u != v
        pairs.append(np.stack([u[nonloop], v[nonloop]], axis=1))
    return np.concatenate(pairs) if pairs else np.zeros((0, 2), np.int64)


def gen_lattice(spec: LatticeSpec) -> Graph:
    """Directed 2D lattice.

    ORIENTED: every listed adjacent pair (u, v) becomes u->v with probability
    ``p_forward`` and v->u otherwise.

    SAMPLED: every vertex draws for each of its (up to four) lattice neighbours
    independently: u->v with ``p_forward``, v->u with ``p_backward``, nothing
    otherwise. A pair is therefore drawn twice and may end with both directions.
    """
    n = spec.rows * spec.cols
    rng = rng_for(spec.seed)
    pairs = lattice_pairs(spec.rows, spec.cols, spec.wrap)
    if spec.scheme is Scheme.ORIENTED:
        fwd = rng.random(len(pairs)) < spec.p_forward
        edges = np.where(fwd[:, None], pairs, pairs[:, ::-1])
    else:
        # both endpoints of a pair look at each other: draw once from each side
        both = np.concatenate([pairs, pairs[:, ::-1]])
        x = rng.random(len(both))
        out = both[x < spec.p_forward]
        back = both[(x >= spec.p_forward) & (x < spec.p_forward + spec.p_backward)][:, ::-1]
        edges = np.concatenate([out, back])
    return build_csr(n, edges)


def gen_random_digraph(n: int, m: int, seed: int) -> Graph:
    """``m`` distinct non-loop directed edges chosen uniformly without replacement."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    cap = n * (n - 1)
    if m > cap:
        raise ValueError(f"m={m} exceeds the {cap} possible edges on {n} vertices")
    rng = rng_for(seed)
    codes = rng.choice(cap, size=m, replace=False) if m else np.zeros(0, np.int64)
    # code k -> (u, v) skipping the diagonal
    u, rest = np.divmod(codes.astype(np.int64), max(n - 1, 1))
    v = rest + (rest >= u)
    return build_csr(n, np.stack([u, v], axis=1))


def gen_random_graph(n: int, m: int, seed: int, connected: bool = False) -> Graph:
    """Undirected graph on ``m`` random distinct edges, optionally with a random spanning tree."""
    cap = n * (n - 1) // 2
    if m > cap:
        raise ValueError(f"m={m} exceeds the {cap} possible undirected edges on {n} vertices")
    rng = rng_for(seed)
    edges = []
    if m:
        codes = rng.choice(cap, size=m, replace=False).astype(np.int64)
        # code -> (u, v), u < v, via the row starts of the strict upper triangle
        starts = np.concatenate([[0], np.cumsum(np.arange(n - 1, 0, -1, dtype=np.int64))])
        u = np.searchsorted(starts, codes, side="right") - 1
        v = u + 1 + (codes - starts[u])
        edges.append(np.stack([u, v], axis=1))
    if connected and n > 1:
        order = rng.permutation(n)
        parent = order[(rng.random(n - 1) * np.arange(1, n)).astype(np.int64)]
        edges.append(np.stack([order[1:], parent], axis=1))
    e = np.concatenate(edges) if edges else np.zeros((0, 2), np.int64)
    return build_csr(n, e, directed=False)
