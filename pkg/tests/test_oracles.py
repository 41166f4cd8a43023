import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from concurgraph import oracles
from concurgraph.lelists import random_priority

from conftest import digraphs, graph_from, ugraphs


@given(digraphs(max_n=25))
def test_tarjan_vs_brute(g):
    assert oracles.partition_sets(oracles.tarjan_scc(g)) == oracles.brute_scc(g)


def test_tarjan_deep_path_no_recursion():
    n = 50_000
    g = graph_from(n, np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1))
    assert np.all(oracles.canonical_partition(oracles.tarjan_scc(g)) == 0)


@given(ugraphs(max_n=8, max_deg=3))
def test_ht_vs_brute(g):
    b = oracles.brute_bcc(g)
    h = oracles.hopcroft_tarjan_bcc(g)
    assert (h.components, h.articulation, h.bridges) == (b.components, b.articulation, b.bridges)


@given(ugraphs(max_n=40), st.integers(0, 10**6))
def test_cohen_vs_brute(g, seed):
    order = random_priority(g.n, seed)
    assert oracles.cohen_lelists(g, order) == oracles.brute_lelists(g, order)


@given(digraphs(max_n=30), st.data())
def test_bfs_vs_hops(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    assert np.array_equal(oracles.seq_bfs_reach(g, s), oracles.all_pairs_hops(g)[s] >= 0)


def test_canonical_partition():
    assert oracles.canonical_partition([9, 4, 9, 7, 4]).tolist() == [0, 1, 0, 3, 1]


# cross-check against networkx when it is installed

@given(digraphs(max_n=40))
def test_scc_networkx(g):
    nx = pytest.importorskip("networkx")
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges().tolist())
    want = {frozenset(c) for c in nx.strongly_connected_components(G)}
    assert oracles.partition_sets(oracles.tarjan_scc(g)) == want


@given(ugraphs(max_n=40))
def test_bcc_networkx(g):
    nx = pytest.importorskip("networkx")
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges().tolist())
    ref = oracles.hopcroft_tarjan_bcc(g)
    assert ref.components == {frozenset(c) for c in nx.biconnected_components(G)}
    assert ref.articulation == set(nx.articulation_points(G))
    assert ref.bridges == {tuple(sorted(e)) for e in nx.bridges(G)}
