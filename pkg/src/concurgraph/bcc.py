"""Biconnected components by vertex labeling.

Steps: a spanning forest from connectivity, an Euler tour of each tree by list
ranking, ``first``/``last``/``low``/``high`` per vertex from sparse-table range
queries, and a second connectivity run that skips back edges and critical tree
edges. Every non-root vertex gets the label of its component in that run; a
label plus its head vertex is one biconnected component.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import Params
from .connectivity import run_cc
from .graph import Graph, GraphError

PHASES = ("first_cc", "euler_tour", "low_high", "last_cc")

TREE = 0
BACK = 1
CROSS = 2


@dataclass
class SpanningForest:
    n: int
    edges: np.ndarray  # (k, 2) undirected tree edges
    root: np.ndarray  # root (smallest vertex id) of each vertex's tree


@dataclass
class EulerTour:
    order: np.ndarray  # vertex at each tour position, trees laid out one after another
    first: np.ndarray
    last: np.ndarray
    parent: np.ndarray  # -1 for roots

    def is_root(self) -> np.ndarray:
        return self.parent < 0


@dataclass
class LowHigh:
    w1: np.ndarray
    w2: np.ndarray
    low: np.ndarray
    high: np.ndarray


@dataclass
class BcLabeling:
    label: np.ndarray  # per vertex, -1 for tree roots
    head: np.ndarray  # per label
    timings: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.head.size)

    def members(self) -> list[np.ndarray]:
        verts = np.flatnonzero(self.label >= 0)
        order = np.argsort(self.label[verts], kind="stable")
        verts = verts[order]
        cuts = np.flatnonzero(np.diff(self.label[verts])) + 1
        return np.split(verts, cuts) if verts.size else []

    def components(self) -> set[frozenset]:
        """Vertex sets: each label's members plus its head."""
        out = set()
        for lab, vs in enumerate(self.members()):
            out.add(frozenset(vs.tolist()) | {int(self.head[lab])})
        return out


# ---------------------------------------------------------------------------
# forest and tour


def spanning_forest(g: Graph, params: Params | None = None) -> SpanningForest:
    cc = run_cc(g, params, forest=True)
    return SpanningForest(g.n, cc.forest, cc.canonical())


def list_rank(succ: np.ndarray) -> np.ndarray:
    """Distance to the end of its list for every node (``succ`` is -1 at the end)."""
    dist = (succ >= 0).astype(np.int64)
    nxt = succ.copy()
    while True:
        live = nxt >= 0
        if not live.any():
            return dist
        idx = np.flatnonzero(live)
        dist[idx] += dist[nxt[idx]]
        nxt[idx] = nxt[nxt[idx]]


def euler_tour(f: SpanningForest) -> EulerTour:
    n = f.n
    e = np.asarray(f.edges, np.int64).reshape(-1, 2)
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    key = src * n + dst
    arcs = np.argsort(key, kind="stable")
    src, dst, key = src[arcs], dst[arcs], key[arcs]
    k = src.size
    arc_off = np.zeros(n + 1, np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=arc_off[1:])
    twin = np.searchsorted(key, dst * n + src)

    # the arc after u->v is the one following v->u in v's circular list
    nxt = twin + 1
    wrap = nxt == arc_off[dst + 1]
    nxt[wrap] = arc_off[dst[wrap]]

    root = f.root
    roots = np.flatnonzero(root == np.arange(n))
    size = np.bincount(root, minlength=n)
    tour_len = 2 * size[roots] - 1
    base = np.zeros(n, np.int64)
    base[roots] = np.cumsum(tour_len) - tour_len
    total = int(tour_len.sum())

    # open every circuit just before the root's first arc
    has_arcs = roots[arc_off[roots + 1] > arc_off[roots]]
    closing = twin[arc_off[has_arcs + 1] - 1]
    succ = nxt.copy()
    succ[closing] = -1
    dist = list_rank(succ) if k else np.zeros(0, np.int64)
    arc_root = root[src]
    rank = (2 * size[arc_root] - 3) - dist  # position of the arc within its tree's circuit

    order = np.empty(total, np.int64)
    order[base[roots]] = roots
    pos = base[arc_root] + 1 + rank
    order[pos] = dst
    first = np.full(n, total, np.int64)
    last = np.full(n, -1, np.int64)
    positions = np.arange(total)
    np.minimum.at(first, order, positions)
    np.maximum.at(last, order, positions)

    parent = np.full(n, -1, np.int64)
    down = rank < rank[twin]
    parent[dst[down]] = src[down]
    return EulerTour(order, first, last, parent)


# ---------------------------------------------------------------------------
# range queries


class SparseTable:
    """Static range-min or range-max with O(1) queries."""

    def __init__(self, values: np.ndarray, op=np.minimum):
        self.op = op
        levels = [np.asarray(values)]
        width = 1
        while 2 * width <= levels[0].size:
            prev = levels[-1]
            levels.append(op(prev[:-width], prev[width:]))
            width *= 2
        self.levels = levels

    def query(self, lo, hi) -> np.ndarray:
        """Aggregate over the inclusive ranges ``[lo, hi]``."""
        lo = np.asarray(lo, np.int64)
        hi = np.asarray(hi, np.int64)
        span = hi - lo + 1
        k = np.zeros(span.shape, np.int64)
        if span.size:
            k = np.floor(np.log2(span)).astype(np.int64)
        out = np.empty(span.shape, self.levels[0].dtype)
        for lvl in np.unique(k).tolist():
            sel = k == lvl
            tab = self.levels[lvl]
            out[sel] = self.op(tab[lo[sel]], tab[hi[sel] - (1 << lvl) + 1])
        return out


def _edge_arrays(g: Graph):
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.offsets))
    return src, g.targets.astype(np.int64)


def compute_low_high(g: Graph, tour: EulerTour) -> LowHigh:
    src, dst = _edge_arrays(g)
    p = tour.parent
    tree = (p[dst] == src) | (p[src] == dst)
    nt_src, nt_dst = src[~tree], dst[~tree]
    first = tour.first
    w1 = first.copy()
    w2 = first.copy()
    np.minimum.at(w1, nt_src, first[nt_dst])
    np.maximum.at(w2, nt_src, first[nt_dst])
    low = SparseTable(w1[tour.order], np.minimum).query(tour.first, tour.last)
    high = SparseTable(w2[tour.order], np.maximum).query(tour.first, tour.last)
    return LowHigh(w1, w2, low, high)


def classify_edges(g: Graph, tour: EulerTour, lh: LowHigh):
    """Per CSR slot: edge kind (TREE/BACK/CROSS) and whether it is a critical tree edge."""
    src, dst = _edge_arrays(g)
    p = tour.parent
    first, last = tour.first, tour.last
    down = p[dst] == src  # src is dst's parent
    up = p[src] == dst
    kind = np.full(src.size, CROSS, np.int8)
    nested = ((first[src] <= first[dst]) & (first[dst] <= last[src])) | \
             ((first[dst] <= first[src]) & (first[src] <= last[dst]))
    kind[nested] = BACK
    kind[down | up] = TREE
    par = np.where(down, src, dst)
    child = np.where(down, dst, src)
    critical = (down | up) & (lh.low[child] >= first[par]) & (lh.high[child] <= last[par])
    return kind, critical


def run_bcc(g: Graph, params: Params | None = None) -> BcLabeling:
    params = params or Params()
    if not g.symmetric:
        raise GraphError("run_bcc needs an undirected (symmetric) graph")
    timings = {}
    t0 = time.perf_counter()
    forest = spanning_forest(g, params)
    timings["first_cc"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    tour = euler_tour(forest)
    timings["euler_tour"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    lh = compute_low_high(g, tour)
    kind, critical = classify_edges(g, tour, lh)
    timings["low_high"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    keep = ((kind != BACK) & ~critical).astype(np.uint8)
    cc = run_cc(g, params, edge_ok=keep)
    root = tour.is_root()
    raw = cc.label
    # compact labels over non-root vertices
    uniq, inv = np.unique(raw[~root], return_inverse=True)
    label = np.full(g.n, -1, np.int64)
    label[~root] = inv.ravel()
    head = np.full(uniq.size, -1, np.int64)
    src, dst = _edge_arrays(g)
    down = critical & (tour.parent[dst] == src)
    p, c = src[down], dst[down]
    # a critical edge inside one label is not a component boundary
    boundary = root[p] | (label[p] != label[c])
    head[label[c[boundary]]] = p[boundary]
    timings["last_cc"] = time.perf_counter() - t0
    return BcLabeling(label, head, timings)


def articulation_points(lab: BcLabeling) -> set[int]:
    if lab.head.size == 0:
        return set()
    heads, counts = np.unique(lab.head, return_counts=True)
    is_root = lab.label[heads] < 0
    return set(heads[~is_root | (counts >= 2)].tolist())


def bridges(lab: BcLabeling) -> set[tuple[int, int]]:
    """Edges forming a two-vertex component."""
    verts = np.flatnonzero(lab.label >= 0)
    sizes = np.bincount(lab.label[verts], minlength=lab.head.size)
    lone = verts[sizes[lab.label[verts]] == 1]
    h = lab.head[lab.label[lone]]
    return set(zip(np.minimum(lone, h).tolist(), np.maximum(lone, h).tolist()))
