import random

from kmodal.decompose import is_biconnected, spqr_tree
from kmodal.digraph import INN, OUT
from kmodal.oracle import all_orientations, gen_good_skel_instance, gen_planar_bounded_degree
from kmodal.rnode import (
    Rejected,
    SkelInstance,
    brute_force,
    instance_to_text,
    irreducible_profile_ok,
    is_good,
    r_tuples,
    r_tuples_brute,
    reduce,
    selection_ok,
    solve_good_instance,
    to_formula,
    vertex_modality,
)
from kmodal.tuples import EmbeddingTuple as T, tree_gists

from _graphs import k4


def _star(sets, m_center=4):
    """Centre 'x' with one edge to each leaf, all edges leaving x."""
    leaves = [f"l{i}" for i in range(len(sets))]
    return SkelInstance(
        vertices=["x"] + leaves,
        ends={i: ("x", leaf) for i, leaf in enumerate(leaves)},
        rotation={"x": list(range(len(sets))), **{leaf: [i] for i, leaf in enumerate(leaves)}},
        sets={i: list(s) for i, s in enumerate(sets)},
        m={"x": m_center, **{leaf: 4 for leaf in leaves}},
    )


def test_is_good_thresholds():
    one = [T(OUT, 1, INN, 0)]
    assert is_good(_star([one, one, one]))
    assert not is_good(_star([one, one, [T(OUT, 2, INN, 0)]]))
    assert is_good(_star([[T(OUT, 0, INN, 0)]] * 6))
    assert not is_good(_star([[T(OUT, 0, INN, 0)]] * 7))


def test_marked_vertices_ignored_by_is_good():
    inst = _star([[T(OUT, 3, INN, 0)]] * 3)
    assert not is_good(inst)
    inst.marked.add("x")
    assert is_good(inst)


def test_vertex_modality_glues_pairs():
    fwd = T(OUT, 0, INN, 0)
    inst = _star([[fwd], [fwd], [T(INN, 0, OUT, 0)]])
    pairs = {0: (OUT, 0), 1: (OUT, 0), 2: (INN, 0)}
    assert vertex_modality(inst, "x", pairs) == 2
    pairs = {0: (OUT, 1), 1: (OUT, 0), 2: (INN, 0)}
    assert vertex_modality(inst, "x", pairs) == 2


def test_reduce_singletons_all_marked():
    inst = _star([[T(OUT, 0, INN, 0)]] * 3)
    red = reduce(inst)
    assert red.marked == set(inst.vertices)
    assert solve_good_instance(inst) == {i: T(OUT, 0, INN, 0) for i in range(3)}


def test_reduce_rejects_forced_violation():
    # alternating singletons force modality 2 at x, above m(x) = 0
    inst = _star([[T(OUT, 0, INN, 0)], [T(OUT, 1, INN, 0)]], m_center=0)
    try:
        reduce(inst)
    except Rejected:
        pass
    else:
        raise AssertionError("expected a rejection")
    assert solve_good_instance(inst) is None
    assert brute_force(inst) is None


def test_instance_text_lists_everything():
    inst = _star([[T(OUT, 0, INN, 0)]] * 3)
    text = instance_to_text(inst)
    assert text.count("vertex") == 4 and text.count("edge") == 3


def test_solver_matches_brute_force_on_generated_instances():
    for seed in range(150):
        inst = gen_good_skel_instance(4 + 2 * (seed % 3), seed)
        assert is_good(inst)
        got = solve_good_instance(inst)
        ref = brute_force(inst)
        assert (got is None) == (ref is None), seed
        if got is not None:
            assert selection_ok(inst, got)


def test_irreducible_instances_fit_profile():
    seen = 0
    for seed in range(200):
        inst = gen_good_skel_instance(8, seed)
        try:
            red = reduce(inst)
        except Rejected:
            continue
        assert irreducible_profile_ok(red)
        f, bvar = to_formula(red)
        assert f.is_two_occurrence()
        seen += len(red.inst.vertices) - len(red.marked)
    assert seen > 0


def _r_nodes(g, m):
    tree = spqr_tree(g)
    gists = tree_gists(tree, m, 4, rigid="exhaustive")
    for nd in tree.nodes:
        if nd.kind == "R":
            yield nd, {key: gists[nd.children[key].index][0] for key in nd.keys}


def test_k4_rigid_tuples_match_enumeration():
    for d in all_orientations(k4()):
        for mu in (2, 4):
            m = {v: 4 for v in d.vertices}
            m[0] = mu
            for nd, kids in _r_nodes(d, m):
                assert r_tuples(nd, kids, m)[0] == r_tuples_brute(nd, kids, m)[0]


def test_rigid_tuples_match_enumeration_on_random_graphs():
    checked = 0
    for seed in range(150):
        rng = random.Random(seed)
        g = gen_planar_bounded_degree(rng.randint(5, 9), 6, seed, density=1.0)
        if not is_biconnected(g):
            continue
        m = {v: rng.choice((2, 4)) for v in g.vertices}
        for nd, kids in _r_nodes(g, m):
            if any(not gist for gist in kids.values()):
                continue
            gist, back = r_tuples(nd, kids, m)
            assert gist == r_tuples_brute(nd, kids, m)[0]
            for t in gist:
                reflect, sel = back[t]
                assert all(sel[key] in kids[key] for key in nd.keys)
            checked += 1
    assert checked >= 20
