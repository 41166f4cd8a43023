"""Sequential reference algorithms used as ground truth by the tests.

Everything here is single-threaded, plain Python over CSR arrays, and written
for auditability rather than speed. The ``brute_*`` functions evaluate the
definitions directly and are only meant for graphs with a handful of vertices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import Graph


def _adj(g: Graph) -> list[list[int]]:
    off = g.offsets.tolist()
    tgt = g.targets.tolist()
    return [tgt[off[v]:off[v + 1]] for v in range(g.n)]


def canonical_partition(labels) -> np.ndarray:
    """Relabel so each class is named by its smallest member."""
    labels = np.asarray(labels)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    return first[inv.ravel()].astype(np.int64)


def partition_sets(labels) -> set[frozenset]:
    groups: dict = {}
    for v, l in enumerate(np.asarray(labels).tolist()):
        groups.setdefault(l, []).append(v)
    return {frozenset(vs) for vs in groups.values()}


# ---------------------------------------------------------------------------
# reachability and components


def seq_bfs_reach(g: Graph, src: int) -> np.ndarray:
    adj = _adj(g)
    seen = np.zeros(g.n, bool)
    seen[src] = True
    q = deque([src])
    while q:
        x = q.popleft()
        for u in adj[x]:
            if not seen[u]:
                seen[u] = True
                q.append(u)
    return seen


def seq_components(g: Graph) -> np.ndarray:
    """Component label per vertex (the smallest vertex id of its component)."""
    adj = _adj(g)
    label = np.full(g.n, -1, np.int64)
    for s in range(g.n):
        if label[s] >= 0:
            continue
        label[s] = s
        q = deque([s])
        while q:
            x = q.popleft()
            for u in adj[x]:
                if label[u] < 0:
                    label[u] = s
                    q.append(u)
    return label


def tarjan_scc(g: Graph) -> np.ndarray:
    """SCC id per vertex, iterative Tarjan; ids follow completion order."""
    adj = _adj(g)
    n = g.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = np.full(n, -1, np.int64)
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            nbrs = adj[v]
            while i < len(nbrs):
                u = nbrs[i]
                i += 1
                if index[u] < 0:
                    work.append((v, i))
                    work.append((u, 0))
                    recurse = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], index[u])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[v])
    return comp


# ---------------------------------------------------------------------------
# biconnectivity


@dataclass
class BccSets:
    components: set[frozenset]
    articulation: set[int]
    bridges: set[tuple[int, int]]


def hopcroft_tarjan_bcc(g: Graph) -> BccSets:
    """Vertex sets of the biconnected components, cut vertices and bridges.

    Isolated vertices belong to no component.
    """
    adj = _adj(g)
    n = g.n
    disc = [-1] * n
    low = [0] * n
    comps: set[frozenset] = set()
    arts: set[int] = set()
    bridges: set[tuple[int, int]] = set()
    t = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = t
        t += 1
        edge_stack: list[tuple[int, int]] = []
        root_children = 0
        work = [(root, -1, 0)]
        while work:
            v, parent, i = work.pop()
            nbrs = adj[v]
            descended = False
            while i < len(nbrs):
                u = nbrs[i]
                i += 1
                if u == parent:
                    continue
                if disc[u] < 0:
                    edge_stack.append((v, u))
                    disc[u] = low[u] = t
                    t += 1
                    work.append((v, parent, i))
                    work.append((u, v, 0))
                    descended = True
                    break
                if disc[u] < disc[v]:
                    edge_stack.append((v, u))
                    low[v] = min(low[v], disc[u])
            if descended:
                continue
            if parent < 0:
                continue
            p = parent
            low[p] = min(low[p], low[v])
            if low[v] >= disc[p]:
                comp = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.add(a)
                    comp.add(b)
                    if (a, b) == (p, v):
                        break
                comps.add(frozenset(comp))
                if len(comp) == 2:
                    bridges.add((min(p, v), max(p, v)))
                if p == root:
                    root_children += 1
                else:
                    arts.add(p)
        if root_children >= 2:
            arts.add(root)
    return BccSets(comps, arts, bridges)


# ---------------------------------------------------------------------------
# LE-lists


def cohen_lelists(g: Graph, order) -> list[list[tuple[int, int]]]:
    """LE-lists by pruned BFS from each vertex in priority order.

    ``order[0]`` is the earliest vertex. Each list is in priority order, which
    is also decreasing distance, and ends with ``(v, 0)``.
    """
    adj = _adj(g)
    inf = g.n + 1
    delta = [inf] * g.n
    lists: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for s in np.asarray(order).tolist():
        delta[s] = 0
        lists[s].append((s, 0))
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for x in frontier:
                for u in adj[x]:
                    if d < delta[u]:
                        delta[u] = d
                        lists[u].append((s, d))
                        nxt.append(u)
            frontier = nxt
    return lists


# ---------------------------------------------------------------------------
# definitional brute forces (tiny graphs only)


def all_pairs_hops(g: Graph) -> np.ndarray:
    """Hop distances, -1 when unreachable."""
    adj = _adj(g)
    dist = np.full((g.n, g.n), -1, np.int64)
    for s in range(g.n):
        dist[s, s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for u in adj[x]:
                if dist[s, u] < 0:
                    dist[s, u] = dist[s, x] + 1
                    q.append(u)
    return dist


def brute_scc(g: Graph) -> set[frozenset]:
    reach = all_pairs_hops(g) >= 0
    mutual = reach & reach.T
    return {frozenset(np.nonzero(mutual[v])[0].tolist()) for v in range(g.n)}


def brute_lelists(g: Graph, order) -> list[list[tuple[int, int]]]:
    dist = all_pairs_hops(g)
    order = np.asarray(order).tolist()
    out = []
    for v in range(g.n):
        best = None
        entries = []
        for s in order:
            d = int(dist[s, v])
            if d < 0:
                continue
            if best is None or d < best:
                entries.append((s, d))
                best = d
        out.append(entries)
    return out


def _connected(vertices, adj, removed=frozenset(), removed_edge=None) -> int:
    """Number of components among ``vertices`` minus ``removed``."""
    left = set(vertices) - removed
    count = 0
    while left:
        s = left.pop()
        count += 1
        stack = [s]
        while stack:
            x = stack.pop()
            for u in adj[x]:
                if removed_edge and {x, u} == removed_edge:
                    continue
                if u in left:
                    left.remove(u)
                    stack.append(u)
    return count


def brute_bcc(g: Graph) -> BccSets:
    """Maximal vertex sets of size >= 2 inducing a connected graph without cut vertices."""
    adj = _adj(g)
    n = g.n
    good = []
    for k in range(n, 1, -1):
        for sub in combinations(range(n), k):
            s = set(sub)
            sub_adj = [[u for u in adj[v] if u in s] if v in s else [] for v in range(n)]
            if _connected(s, sub_adj) != 1:
                continue
            if k > 2 and any(_connected(s, sub_adj, frozenset([x])) != 1 for x in s):
                continue
            if not any(s <= t for t in good):
                good.append(frozenset(s))
    base = _connected(range(n), adj)
    arts = {v for v in range(n) if _connected(range(n), adj, frozenset([v])) > base}
    bridges = set()
    for v in range(n):
        for u in adj[v]:
            if v < u and _connected(range(n), adj, removed_edge={v, u}) > base:
                bridges.add((v, u))
    return BccSets(set(good), arts, bridges)
