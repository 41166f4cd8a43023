import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from concurgraph import Params
from concurgraph.generators import LatticeSpec, Scheme, gen_lattice, gen_random_digraph
from concurgraph.oracles import canonical_partition, partition_sets, tarjan_scc
from concurgraph.scc import (TOP_BIT, UNDECIDED, SccLabels, first_scc, pick_pivot, run_scc,
                             signature_hash, trim)

from conftest import digraphs, graph_from

A, B, C, D, E, F, G, H, I, J, K, L = range(12)


def twelve_vertex_example():
    edges = [(A, B), (B, C), (C, K), (K, A), (C, D), (D, E), (E, F), (F, D), (F, I), (I, J),
             (J, L), (G, H), (H, G), (H, I)]
    return graph_from(12, edges)


def test_example_components():
    res = run_scc(twelve_vertex_example(), Params(threads=1))
    want = {frozenset(s) for s in ({A, B, C, K}, {D, E, F}, {G, H}, {I}, {J}, {L})}
    assert partition_sets(res.label) == want
    assert res.count == 6 and res.largest == 4


def test_example_reach_sets():
    from concurgraph.reach import single_reach
    g = twelve_vertex_example()
    fa = set(np.flatnonzero(single_reach(g, A, params=Params(threads=1)).visited).tolist())
    fg = set(np.flatnonzero(single_reach(g, G, params=Params(threads=1)).visited).tolist())
    assert fa == {A, B, C, D, E, F, I, J, K, L}
    assert fg == {G, H, I, J, L}


def test_trim_marks_sources_and_sinks():
    g = twelve_vertex_example()
    labels = SccLabels.fresh(g.n)
    # L has no out-edges; nothing else is trimmed in one pass
    assert trim(g, labels) == 1
    assert labels.done[L] == 1 and labels.label[L] == L
    assert np.all(labels.label[labels.done == 0] == UNDECIDED)


def test_trim_single_pass():
    # a chain: only the endpoints go in the first pass
    g = graph_from(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    labels = SccLabels.fresh(5)
    assert trim(g, labels) == 2
    assert trim(g, labels) == 2
    assert trim(g, labels) == 1


def test_first_scc_peels_pivot_component():
    g = twelve_vertex_example()
    labels = SccLabels.fresh(g.n)
    trim(g, labels)
    size, fw, bw = first_scc(g, labels, Params(threads=1), D)
    assert size == 3
    assert set(np.flatnonzero(labels.done).tolist()) == {D, E, F, L}
    # vertices reached one way only got distinct hashed labels
    assert labels.label[I] < 0 and labels.label[A] < 0
    assert labels.label[I] != labels.label[A]


def test_pivot_choice():
    g = twelve_vertex_example()
    labels = SccLabels.fresh(g.n)
    assert pick_pivot(g, labels, "maxdeg") in {C, F, H}  # in*out = 2
    assert 0 <= pick_pivot(g, labels, "random", seed=3) < g.n
    with pytest.raises(ValueError):
        pick_pivot(g, labels, "best")


# ---------------------------------------------------------------------------
# signature labels


@given(st.lists(st.integers(0, 2**31), max_size=20), st.lists(st.integers(0, 2**31), max_size=20),
       st.randoms())
def test_signature_ignores_order(ins, outs, rnd):
    a = signature_hash(-1, ins, outs)
    rnd.shuffle(ins)
    rnd.shuffle(outs)
    assert signature_hash(-1, ins, outs) == a


@given(st.sets(st.integers(0, 2**31), min_size=1, max_size=8))
def test_signature_has_top_bit_and_sides_differ(srcs):
    a = signature_hash(-1, srcs, [])
    b = signature_hash(-1, [], srcs)
    assert a < 0 and b < 0 and a & int(TOP_BIT) and a != b


def test_signature_empty_keeps_label():
    assert signature_hash(12345, [], []) == 12345


def test_signature_collision_sweep():
    rng = np.random.default_rng(0)
    seen = {}
    for _ in range(20_000):
        k_in, k_out = rng.integers(0, 4, 2)
        ins = frozenset(rng.integers(0, 64, k_in).tolist())
        outs = frozenset(rng.integers(0, 64, k_out).tolist())
        if not ins and not outs:
            continue
        old = int(rng.choice([-1, -7, -9]))
        key = (old, ins, outs)
        h = signature_hash(old, ins, outs)
        assert seen.setdefault(h, key) == key


# ---------------------------------------------------------------------------
# against Tarjan


@given(digraphs(max_n=50), st.sampled_from([1, 4, 512]), st.integers(0, 100))
def test_matches_tarjan_small(g, tau, seed):
    res = run_scc(g, Params(threads=1, seed=seed).replace(tau=tau))
    assert np.array_equal(canonical_partition(res.label), canonical_partition(tarjan_scc(g)))


@pytest.mark.parametrize("threads", [1, 4])
@pytest.mark.parametrize("pivot", ["maxdeg", "random"])
def test_matches_tarjan_random(threads, pivot):
    g = gen_random_digraph(3000, 4500, seed=threads)
    res = run_scc(g, Params(threads=threads), pivot=pivot)
    assert np.array_equal(canonical_partition(res.label), canonical_partition(tarjan_scc(g)))


@pytest.mark.parametrize("scheme", [Scheme.ORIENTED, Scheme.SAMPLED])
def test_matches_tarjan_lattice(scheme):
    kw = dict(p_forward=0.3, p_backward=0.3) if scheme is Scheme.SAMPLED else {}
    g = gen_lattice(LatticeSpec(80, 60, scheme=scheme, seed=4, **kw))
    res = run_scc(g, Params(threads=4))
    assert np.array_equal(canonical_partition(res.label), canonical_partition(tarjan_scc(g)))
    assert res.batches > 0 and set(res.timings) >= {"trimming", "first_scc", "labeling"}


def test_table_overflow_retries():
    # lattice classes are large, so the size guess from the batch falls short
    g = gen_lattice(LatticeSpec(100, 100, seed=2))
    res = run_scc(g, Params(threads=1))
    assert res.table_retries > 0
    assert np.array_equal(canonical_partition(res.label), canonical_partition(tarjan_scc(g)))


def test_empty_and_singleton():
    assert run_scc(graph_from(0, []), Params(threads=1)).count == 0
    assert run_scc(graph_from(1, []), Params(threads=1)).label.tolist() == [0]
