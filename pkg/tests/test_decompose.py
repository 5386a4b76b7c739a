import random

import pytest

from kmodal.decompose import (
    DecompositionError,
    bc_tree,
    is_biconnected,
    pertinent,
    pertinent_edges,
    spqr_tree,
    st_numbering,
    tree_to_dot,
)
from kmodal.oracle import gen_outerplanar, gen_planar_bounded_degree, gen_series_parallel

from _graphs import bowtie, digraph, k4, triangle


def test_bc_single_block():
    t = bc_tree(triangle())
    assert len(t.blocks) == 1 and t.cut_vertices == []


def test_bc_bowtie():
    t = bc_tree(bowtie())
    assert len(t.blocks) == 2 and t.cut_vertices == [0]
    assert sorted(t.blocks_at(0)) == [0, 1]


def test_bc_path_of_three_edges():
    t = bc_tree(digraph([(0, 1), (1, 2), (2, 3)]))
    assert len(t.blocks) == 3
    assert sorted(t.cut_vertices) == [1, 2]
    assert t.postorder()[-1] == t.root


def test_bc_rejects_disconnected():
    with pytest.raises(DecompositionError):
        bc_tree(digraph([(0, 1), (2, 3)]))


def test_bc_blocks_partition_edges():
    for seed in range(50):
        g = gen_outerplanar(random.Random(seed).randint(3, 30), seed, drop_cycle=0.4)
        t = bc_tree(g)
        edges = sorted(e for b in t.blocks for e in b)
        assert edges == sorted(g.edge_ids())
        assert len(t.postorder()) == len(t.blocks)


def test_cycle_gives_series_node():
    g = digraph([(0, 1), (1, 2), (2, 3), (3, 0)])
    tree = spqr_tree(g)
    assert tree.root.kind == "S"
    assert [c.kind for c in tree.root.child_list()] == ["Q", "Q", "Q"]


def test_triple_edge_gives_parallel_node():
    g = digraph([(0, 1), (0, 1), (1, 0)])
    tree = spqr_tree(g)
    assert tree.root.kind == "P"
    assert len(tree.root.child_list()) == 2


def test_k4_gives_rigid_node():
    tree = spqr_tree(k4())
    assert tree.root.kind == "R"
    assert len(tree.root.keys) == 5
    # the reference edge is the root's parent, not a Q node
    assert tree.node_counts() == {"S": 0, "P": 0, "Q": 5, "R": 1}


def test_spqr_rejects_non_biconnected():
    with pytest.raises(DecompositionError):
        spqr_tree(bowtie())


def test_spqr_rejects_nonplanar():
    k5 = digraph([(a, b) for a in range(5) for b in range(a + 1, 5)])
    with pytest.raises(DecompositionError):
        spqr_tree(k5)


def _random_biconnected(seed):
    rng = random.Random(seed)
    kind = seed % 3
    n = rng.randint(4, 14)
    if kind == 0:
        return gen_series_parallel(n, seed)
    if kind == 1:
        return gen_outerplanar(n, seed, keep=0.6, drop_cycle=0.0)
    g = gen_planar_bounded_degree(n, 6, seed, density=1.0)
    return g if is_biconnected(g) else gen_series_parallel(n, seed)


def test_pertinent_partition_and_root_child():
    for seed in range(60):
        g = _random_biconnected(seed)
        tree = spqr_tree(g)
        pert = pertinent_edges(tree)
        assert sorted(pert[tree.root.index]) == sorted(e for e in g.edge_ids() if e != tree.ref_edge)
        for nd in tree.nodes:
            if nd.kind == "Q":
                assert pert[nd.index] == [nd.edge]
            else:
                kids = sorted(e for c in nd.child_list() for e in pert[c.index])
                assert kids == sorted(pert[nd.index])


def test_pertinent_graph_has_node_poles():
    tree = spqr_tree(k4())
    sub, poles = pertinent(tree, tree.root)
    assert poles == tree.root.poles
    assert sub.m == 5


def test_no_adjacent_same_kind_nodes():
    for seed in range(60):
        tree = spqr_tree(_random_biconnected(seed))
        for nd in tree.nodes:
            for c in nd.child_list():
                assert not (nd.kind == c.kind and nd.kind in "SP")


def test_first_pole_and_ref_edge():
    g = gen_series_parallel(9, 3)
    e = g.edge_ids()[4]
    t, h = g.ends(e)
    tree = spqr_tree(g, e, first_pole=h)
    assert tree.root.poles == (h, t)


def test_st_numbering_is_bipolar():
    for seed in range(40):
        g = _random_biconnected(seed)
        ends = {e: g.ends(e) for e in g.edge_ids()}
        s, t = ends[g.edge_ids()[0]]
        num = st_numbering(list(g.vertices), ends, list(ends), s, t, g.edge_ids()[0])
        assert num[s] == min(num.values()) and num[t] == max(num.values())
        for v in g.vertices:
            if v in (s, t):
                continue
            nbrs = [num[g.other(e, v)] for e in g.incident(v)]
            assert min(nbrs) < num[v] < max(nbrs)


def test_tree_to_dot_mentions_every_node():
    tree = spqr_tree(k4())
    dot = tree_to_dot(tree)
    assert dot.count("label=") >= len(tree.nodes)
