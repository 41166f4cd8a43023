"""Small worked cases for every module, plus a few larger oracle sweeps."""
import numpy as np
import pytest
from numba import njit

from concurgraph import Params, build_csr, symmetrize
from concurgraph import oracles
from concurgraph.bcc import (SpanningForest, articulation_points, bridges, compute_low_high,
                             euler_tour, run_bcc, spanning_forest)
from concurgraph.connectivity import UnionFind, ldd, run_cc
from concurgraph.formats import load_graph, save_graph
from concurgraph.generators import (LatticeSpec, Scheme, gen_lattice, gen_random_digraph,
                                    gen_random_graph)
from concurgraph.graph import out_degree
from concurgraph.hashbag import HashBag
from concurgraph.lelists import check_list, filter_candidates, parse_lelists, run_lelists
from concurgraph.reach import ReachPairTable, choose_mode, multi_reach, single_reach
from concurgraph.scc import (SccLabels, _SALT_IN, _SALT_OUT, combine_signature, first_scc,
                             run_scc, source_mix, trim)

from conftest import graph_from

CYCLE3 = [(0, 1), (1, 2), (2, 0)]


# graph, formats, generators

def test_graph_basics():
    g = graph_from(3, CYCLE3)
    assert g.degrees().tolist() == [1, 1, 1]
    assert graph_from(2, [(0, 1), (0, 1)]).m == 1
    e = graph_from(4, [])
    assert e.m == 0 and e.offsets.tolist() == [0] * 5
    assert out_degree(graph_from(6, [(0, i) for i in range(1, 6)]), 0) == 5
    assert out_degree(e, 0) == 0


def test_symmetrize_cases():
    s = symmetrize(graph_from(2, [(0, 1)]))
    assert sorted(map(tuple, s.edges().tolist())) == [(0, 1), (1, 0)]
    both = graph_from(3, CYCLE3 + [(b, a) for a, b in CYCLE3])
    assert symmetrize(both).m == both.m


def test_text_format_example(tmp_path):
    p = tmp_path / "c.adj"
    text = "AdjacencyGraph\n3\n3\n0\n1\n2\n1\n2\n0\n"
    p.write_text(text)
    g = load_graph(p)
    assert sorted(map(tuple, g.edges().tolist())) == CYCLE3
    save_graph(g, tmp_path / "again.adj")
    assert (tmp_path / "again.adj").read_text() == text


def test_generator_cases():
    assert gen_lattice(LatticeSpec(1, 1)).m == 0
    z = LatticeSpec(6, 6, scheme=Scheme.SAMPLED, p_forward=0.0, p_backward=0.0, seed=2)
    assert gen_lattice(z).m == 0
    assert gen_random_digraph(5, 0, seed=1).m == 0
    assert gen_random_digraph(5, 20, seed=1).m == 20
    assert gen_random_digraph(100, 300, seed=7).same_structure(gen_random_digraph(100, 300, seed=7))


# hash bag

def test_bag_cases():
    b = HashBag(0)
    assert b.capacity >= b.lam
    b.insert(11)
    assert b.extract_all().tolist() == [11]
    assert HashBag(5).extract_all().size == 0
    assert HashBag(10**6, alpha=0.5).capacity >= 2 * 10**6
    assert HashBag(10**5, lam=1024).tail[:3].tolist() == [1024, 2048, 4096]
    calls = []
    HashBag(5).for_all(calls.append)
    assert calls == []


def test_bag_final_chunk_bound():
    lam, alpha = 1024, 0.5
    for s in (10, 5000, 100_000):
        b = HashBag(s, lam=lam, alpha=alpha, seed=s)
        b.insert_many(np.arange(s), threads=1)
        assert b.r <= int(np.ceil(np.log2(s / (alpha * lam) + 1))) + 2


# reach

def test_reach_cases():
    g = graph_from(3, CYCLE3)
    assert single_reach(g, 0, params=Params(threads=1)).visited.all()
    n = 1000
    path = build_csr(n, np.stack([np.arange(n - 1), np.arange(1, n)], axis=1))
    r512 = single_reach(path, 0, params=Params(threads=1)).rounds
    r1 = single_reach(path, 0, params=Params(threads=1).replace(tau=1)).rounds
    assert r512 < r1
    assert choose_mode(np.arange(n), path.offsets, path.m, 20.0) == "dense"
    assert choose_mode(np.array([5]), path.offsets, path.m, 20.0) == "sparse"


def test_isolated_vertex_search():
    g = graph_from(3, [(1, 2)])
    r = single_reach(g, 0, params=Params(threads=1))
    assert r.visited.tolist() == [True, False, False] and r.rounds == 1


def test_multi_reach_single_source_reduces():
    g = gen_random_digraph(400, 1200, seed=3)
    table = ReachPairTable.for_pairs(g.n + 1)
    multi_reach(g, [[7, 7]], np.zeros(g.n, np.int64), np.zeros(g.n, np.uint8), table,
                Params(threads=1))
    got = sorted(table.pairs()[:, 0].tolist())
    assert got == np.flatnonzero(single_reach(g, 7, params=Params(threads=1)).visited).tolist()


def test_multi_reach_eight_sources():
    g = gen_random_digraph(500, 1500, seed=5)
    labels = np.random.default_rng(1).integers(0, 3, g.n).astype(np.int64)
    done = np.zeros(g.n, np.uint8)
    srcs = np.arange(0, 400, 50)
    table = ReachPairTable.for_pairs(8 * g.n)
    multi_reach(g, np.stack([srcs, srcs], axis=1), labels, done, table, Params(threads=4))
    want = set()
    for s in srcs.tolist():
        seen, stack = {s}, [s]
        while stack:
            x = stack.pop()
            for u in g.neighbors(x).tolist():
                if u not in seen and labels[u] == labels[x]:
                    seen.add(u)
                    stack.append(u)
        want |= {(v, s) for v in seen}
    assert {(int(v), int(s)) for v, s in table.pairs()} == want


# scc

def test_trim_cases():
    lab = SccLabels.fresh(3)
    assert trim(graph_from(3, [(0, 1), (1, 2)]), lab) == 2 and lab.done.tolist() == [1, 0, 1]
    assert trim(graph_from(3, CYCLE3), SccLabels.fresh(3)) == 0
    star = graph_from(6, [(0, i) for i in range(1, 6)])
    assert trim(star, SccLabels.fresh(6)) == 6


def test_first_scc_cases():
    g = graph_from(3, CYCLE3)
    lab = SccLabels.fresh(3)
    assert first_scc(g, lab, Params(threads=1), 0)[0] == 3
    assert lab.done.all() and len(set(lab.label.tolist())) == 1
    g = gen_random_digraph(800, 1600, seed=9)
    lab = SccLabels.fresh(g.n)
    first_scc(g, lab, Params(threads=1), 3)
    tarjan = oracles.tarjan_scc(g)
    assert set(np.flatnonzero(lab.done).tolist()) == set(np.flatnonzero(tarjan == tarjan[3]).tolist())


def test_two_two_cycles():
    assert run_scc(graph_from(4, [(0, 1), (1, 0), (2, 3), (3, 2)]), Params(threads=1)).count == 2


@pytest.mark.parametrize("threads", [1, 4])
def test_scc_many_seeds(threads):
    for seed in range(100):
        g = gen_random_digraph(3000, 9000, seed=seed)
        got = run_scc(g, Params(threads=threads, seed=seed)).label
        assert np.array_equal(oracles.canonical_partition(got),
                              oracles.canonical_partition(oracles.tarjan_scc(g)))


@njit
def _sweep(mix_in, mix_out, sets, swap, count):
    """Labels of random source sets and of the same sets with one source swapped."""
    k = sets.shape[1]
    a = np.empty(count, np.int64)
    b = np.empty(count, np.int64)
    for i in range(count):
        s_in = np.int64(0)
        s_out = np.int64(0)
        for j in range(k):
            s_in += mix_in[sets[i, j]]
            s_out += mix_out[sets[i, (j + 1) % k]]
        a[i] = combine_signature(np.int64(-1), s_in, k, s_out, k)
        t_in = s_in - mix_in[sets[i, 0]] + mix_in[swap[i]]
        b[i] = combine_signature(np.int64(-1), t_in, k, s_out, k)
    return a, b


def test_signature_collision_sweep_million():
    rng = np.random.default_rng(42)
    universe = 1 << 16
    mix_in = np.array([source_mix(np.int64(s), _SALT_IN) for s in range(universe)], np.int64)
    mix_out = np.array([source_mix(np.int64(s), _SALT_OUT) for s in range(universe)], np.int64)
    count = 10**6
    sets = rng.integers(0, universe, (count, 4))
    swap = (sets[:, 0] + rng.integers(1, universe, count)) % universe
    a, b = _sweep(mix_in, mix_out, sets, swap, count)
    assert np.all(a != b)
    assert np.all(a < 0)


# connectivity

def test_cc_cases():
    assert run_cc(graph_from(1, [], directed=False), Params(threads=1)).count == 1
    tri2 = graph_from(6, CYCLE3 + [(3, 4), (4, 5), (5, 3)], directed=False)
    assert run_cc(tri2, Params(threads=1)).count == 2
    assert run_cc(graph_from(5, [], directed=False), Params(threads=1)).count == 5
    uf = UnionFind(5)
    assert uf.roots().tolist() == [0, 1, 2, 3, 4]
    uf.union(0, 1)
    assert uf.find(0) == uf.find(1)


def test_ldd_cases():
    k5 = graph_from(5, [(i, j) for i in range(5) for j in range(i + 1, 5)], directed=False)
    d = ldd(k5, Params(threads=1))
    assert len(set(d.label.tolist())) == 1
    grid = symmetrize(gen_lattice(LatticeSpec(50, 50, wrap=False, seed=1)))
    d = ldd(grid, Params(threads=1))
    assert np.all(d.label >= 0)
    e = grid.edges()
    cross = np.mean(d.label[e[:, 0]] != d.label[e[:, 1]])
    assert 0 <= cross < 1


def test_cc_random_5000():
    for seed in range(100):
        g = symmetrize(gen_random_digraph(5000, 6000, seed=seed))
        assert np.array_equal(run_cc(g, Params(seed=seed)).canonical(), oracles.seq_components(g))


# bcc

def _forest(n, edges):
    g = graph_from(n, edges, directed=False)
    return SpanningForest(n, np.asarray(edges, np.int64), oracles.seq_components(g))


def test_forest_cases():
    tree = [(0, 1), (1, 2), (1, 3), (3, 4)]
    f = spanning_forest(graph_from(5, tree, directed=False), Params(threads=1))
    assert {frozenset(e) for e in f.edges.tolist()} == {frozenset(e) for e in tree}
    f = spanning_forest(graph_from(3, CYCLE3, directed=False), Params(threads=1))
    assert len(f.edges) == 2
    g = gen_random_graph(500, 700, seed=3, connected=True)
    f = spanning_forest(g, Params(threads=1))
    assert len(f.edges) == 499
    assert np.all(oracles.seq_components(graph_from(500, f.edges, directed=False)) == 0)


def test_tour_single_vertex():
    t = euler_tour(_forest(1, np.zeros((0, 2), np.int64)))
    assert t.order.tolist() == [0] and t.first.tolist() == [0] and t.last.tolist() == [0]


def test_tour_worked_tree():
    # vertex 0 is alone, so the tree on 1..9 is rooted at 1
    edges = [(1, 2), (2, 5), (2, 3), (2, 4), (1, 6), (6, 7), (6, 8), (8, 9)]
    t = euler_tour(_forest(10, edges))
    order = t.order.tolist()
    assert order[0] == 0 and order[1] == 1 and order[-1] == 1 and len(order) == 1 + 17
    assert t.parent[1:].tolist() == [-1, 1, 2, 2, 2, 1, 6, 6, 8]
    desc = {1: set(range(1, 10)), 2: {2, 3, 4, 5}, 6: {6, 7, 8, 9}, 8: {8, 9}}
    for v, sub in desc.items():
        inside = {u for u in range(10) if t.first[v] <= t.first[u] <= t.last[v]}
        assert inside == sub


def test_random_tree_tour_valid():
    g = gen_random_graph(200, 0, seed=4, connected=True)
    t = euler_tour(spanning_forest(g, Params(threads=1)))
    steps = list(zip(t.order[:-1].tolist(), t.order[1:].tolist()))
    assert len(steps) == len(set(steps)) == 2 * 199
    assert all(v in g.neighbors(u).tolist() for u, v in steps)


def test_low_high_cases():
    path = graph_from(4, [(0, 1), (1, 2), (2, 3)], directed=False)
    t = euler_tour(spanning_forest(path, Params(threads=1)))
    lh = compute_low_high(path, t)
    assert np.array_equal(lh.low, t.first)
    tri = graph_from(3, CYCLE3, directed=False)
    # tree 0-1-2: the leaf's back edge reaches the root
    t = euler_tour(_forest(3, [(0, 1), (1, 2)]))
    lh = compute_low_high(tri, t)
    assert lh.low[2] == t.first[0] and lh.high[2] == t.first[2]


def test_bcc_cases():
    lab = run_bcc(graph_from(3, CYCLE3, directed=False), Params(threads=1))
    assert lab.components() == {frozenset({0, 1, 2})}
    assert articulation_points(lab) == set() and bridges(lab) == set()
    lab = run_bcc(graph_from(3, [(0, 1), (1, 2)], directed=False), Params(threads=1))
    assert lab.components() == {frozenset({0, 1}), frozenset({1, 2})}
    assert articulation_points(lab) == {1} and bridges(lab) == {(0, 1), (1, 2)}
    g = gen_random_graph(400, 480, seed=6)
    lab = run_bcc(g, Params())
    ref = oracles.hopcroft_tarjan_bcc(g)
    assert articulation_points(lab) == ref.articulation and bridges(lab) == ref.bridges


# le-lists

def test_lelist_cases():
    assert run_lelists(graph_from(1, [], directed=False), [0]).as_lists() == [[(0, 0)]]
    path = graph_from(3, [(0, 1), (1, 2)], directed=False)
    assert run_lelists(path, [0, 1, 2], Params(threads=1)).as_lists() == [
        [(0, 0)], [(0, 1), (1, 0)], [(0, 2), (1, 1), (2, 0)]]
    g = gen_random_graph(1000, 1500, seed=2)
    order = np.random.default_rng(5).permutation(1000)
    assert run_lelists(g, order).as_lists() == oracles.cohen_lelists(g, order)


def test_filter_cases():
    rank = {1: 0, 2: 1, 3: 2}
    assert filter_candidates([(1, 3), (2, 3)], rank) == [(1, 3)]
    assert filter_candidates([(1, 5), (2, 2), (3, 4)], rank) == [(1, 5), (2, 2)]
    ok = [(1, 4), (2, 1), (3, 0)]
    assert filter_candidates(ok, rank) == ok


def test_pair_dedup_cases():
    t = ReachPairTable(64)
    from concurgraph.lelists import lelist_pair_dedup
    assert lelist_pair_dedup(t, 3, 4)
    assert not lelist_pair_dedup(t, 3, 4)


def test_cli_lelists_file(tmp_path, capsys):
    from concurgraph.cli import main
    g = tmp_path / "g.bin"
    assert main(["gen", "--random", "300", "--undirected", "--seed", "2", "-o", str(g)]) == 0
    out = tmp_path / "out.lel"
    assert main(["lelists", str(g), "--priority-seed", "3", "-o", str(out)]) == 0
    capsys.readouterr()
    from concurgraph.lelists import random_priority
    rank = np.empty(300, np.int64)
    rank[random_priority(300, 3)] = np.arange(300)
    lists = parse_lelists(out.read_text())
    assert len(lists) == 300 and all(check_list(lst, rank) for lst in lists)
