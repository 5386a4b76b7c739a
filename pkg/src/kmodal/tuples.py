"""Embedding tuples and the bottom-up decision procedure.

A tuple ``<s1, a, s2, b>`` summarises an embedding of a pertinent graph
with poles ``u`` (tail side) and ``v`` (head side): ``s1``/``s2`` are the
orientations, at ``u``/``v``, of the pertinent edges on the designated
boundary side and ``a``/``b`` count alternating pairs between consecutive
pertinent edges at the poles.

Convention: rotations are counter-clockwise.  At the tail pole the
pertinent edges run, in rotation order, from the far side to the
designated side (so ``s1`` belongs to the last edge); at the head pole
they run from the designated side (``s2`` is the first edge).
"""

from __future__ import annotations

import gc
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .decompose import SPQRNode, SPQRTree, bc_tree, spqr_tree
from .digraph import (
    Digraph,
    Orientation,
    RotationSystem,
    count_alternations,
    is_planar_rotation,
    satisfies_m,
)


class UnsupportedInstance(Exception):
    """An R-node falls outside the regime the decider handles."""


class EmbeddingTuple(NamedTuple):
    s1: Orientation
    a: int
    s2: Orientation
    b: int

    def mirrored(self) -> "EmbeddingTuple":
        return EmbeddingTuple(self.s1.flip(self.a), self.a, self.s2.flip(self.b), self.b)

    def __repr__(self) -> str:
        return f"<{self.s1.value},{self.a},{self.s2.value},{self.b}>"


T = EmbeddingTuple
Gist = tuple  # of EmbeddingTuple, sorted

# Size bookkeeping for every gist produced by the DP.
GIST_STATS: Counter = Counter()


def dominates(t: EmbeddingTuple, t2: EmbeddingTuple) -> bool:
    """``t`` dominates ``t2`` (written t <= t2)."""
    return t.s1 == t2.s1 and t.s2 == t2.s2 and t.a <= t2.a and t.b <= t2.b


def _tkey(t: EmbeddingTuple):
    return (t.s1.value, t.s2.value, t.a, t.b)


def gist_of(ts: Iterable[EmbeddingTuple]) -> Gist:
    """Minimal elements of ``ts`` under domination, in a fixed order."""
    kept: list = []
    by_class: dict = {}
    for t in sorted(set(ts), key=_tkey):
        cls = by_class.setdefault((t.s1, t.s2), [])
        if any(o.a <= t.a and o.b <= t.b for o in cls):
            continue
        cls.append(t)
        kept.append(t)
    return tuple(kept)


def _record(gist: Gist, k: int) -> Gist:
    GIST_STATS["nodes"] += 1
    GIST_STATS["max_size"] = max(GIST_STATS["max_size"], len(gist))
    if len(gist) > 4 * k:
        GIST_STATS["violations"] += 1
        raise AssertionError(f"gist of size {len(gist)} exceeds 4k = {4 * k}")
    return gist


def contribution(t: EmbeddingTuple, at_tail: bool) -> tuple:
    """(first, last, alternations) of a child's edges in rotation order at a pole."""
    if at_tail:
        return t.s1.flip(t.a), t.s1, t.a
    return t.s2, t.s2.flip(t.b), t.b


def pole_modality(s: Orientation, a: int, s_edge: Orientation) -> int:
    """Modality at a pole once the reference edge closes the outer face."""
    if a % 2:
        return a + 1
    return a if s == s_edge else a + 2


def root_test(s_rho: Iterable[EmbeddingTuple], s_edge_u: Orientation, s_edge_v: Orientation, mu: int, mv: int) -> bool:
    """Whether some tuple of the root child extends to the whole graph."""
    return any(
        pole_modality(t.s1, t.a, s_edge_u) <= mu and pole_modality(t.s2, t.b, s_edge_v) <= mv for t in s_rho
    )


# ---------------------------------------------------------------------------
# Q-, S- and P-node composition
# ---------------------------------------------------------------------------


def q_tuples(g: Digraph, e, u, v) -> Gist:
    return (T(g.orientation(e, u), 0, g.orientation(e, v), 0),)


def junction_modality(left: EmbeddingTuple, right: EmbeddingTuple) -> int:
    """Modality at the vertex shared by consecutive series children."""
    return (
        left.b
        + right.a
        + (left.s2 != right.s1)
        + (left.s2.flip(left.b) != right.s1.flip(right.a))
    )


def _s_compose(children: Sequence[Gist], internal_m: Sequence[int], mu: int, mv: int):
    layer = {t: (None, t) for t in children[0] if t.a <= mu}
    steps = [layer]
    for j in range(1, len(children)):
        bound = internal_m[j - 1]
        nxt: dict = {}
        for p in layer:
            for t in children[j]:
                if junction_modality(p, t) <= bound:
                    q = T(p.s1, p.a, t.s2, t.b)
                    if q not in nxt:
                        nxt[q] = (p, t)
        layer = {t: nxt[t] for t in gist_of(nxt)}
        steps.append(layer)
        if not layer:
            return (), {}
    final = gist_of(t for t in layer if t.b <= mv)
    back = {}
    for t in final:
        picks = []
        cur = t
        for j in range(len(children) - 1, -1, -1):
            prev, ct = steps[j][cur]
            picks.append(ct)
            cur = prev
        back[t] = picks[::-1]
    return final, back


def s_compose(children: Sequence[Gist], internal_m: Sequence[int], pole_m: tuple) -> Gist:
    """Series composition along the path u = w0, w1, ..., wh = v."""
    return _s_compose(children, internal_m, pole_m[0], pole_m[1])[0]


def _pareto(d: dict) -> dict:
    out = {}
    best_b = None
    for (a, b), bp in sorted(d.items()):
        if best_b is None or b < best_b:
            out[(a, b)] = bp
            best_b = b
    return out


def _p_compose(children: Sequence[Gist], mu: int, mv: int):
    zero_rep: dict = {}
    extras: dict = {}
    items: list = []
    for i, gist in enumerate(children):
        if len(gist) == 1 and gist[0].a == 0 and gist[0].b == 0:
            cls = (gist[0].s1, gist[0].s2)
            if cls in zero_rep:
                extras.setdefault(zero_rep[cls], []).append(i)
                continue
            zero_rep[cls] = i
        items.append(i)
    if not all(children[i] for i in items):
        return (), {}
    if sum(1 for i in items if min(t.a for t in children[i]) > 0) > mu:
        return (), {}
    if sum(1 for i in items if min(t.b for t in children[i]) > 0) > mv:
        return (), {}
    groups: list = []
    gindex: dict = {}
    for i in items:
        key = children[i]
        if key not in gindex:
            gindex[key] = len(groups)
            groups.append((key, []))
        groups[gindex[key]][1].append(i)
    counts0 = tuple(len(ix) for _, ix in groups)

    layer: dict = {}
    for gi, (gist, _) in enumerate(groups):
        cnt = list(counts0)
        cnt[gi] -= 1
        for t in gist:
            if t.a > mu or t.b > mv:
                continue
            st = (tuple(cnt), (t.s1, t.s2), (t.s1.flip(t.a), t.s2.flip(t.b)))
            layer.setdefault(st, {}).setdefault((t.a, t.b), (None, None, gi, t))
    layers = [{s: _pareto(d) for s, d in layer.items()}]
    for _ in range(len(items) - 1):
        nxt: dict = {}
        for st, abd in layers[-1].items():
            cnt, first, (ru, rv) = st
            for gi, (gist, _) in enumerate(groups):
                if cnt[gi] == 0:
                    continue
                c2 = list(cnt)
                c2[gi] -= 1
                c2 = tuple(c2)
                for t in gist:
                    ja = t.a + (ru != t.s1)
                    jb = t.b + (rv != t.s2)
                    nst = (c2, first, (t.s1.flip(t.a), t.s2.flip(t.b)))
                    for (a, b) in abd:
                        na, nb = a + ja, b + jb
                        if na > mu or nb > mv:
                            continue
                        d = nxt.setdefault(nst, {})
                        if (na, nb) not in d:
                            d[(na, nb)] = (st, (a, b), gi, t)
        layers.append({s: _pareto(d) for s, d in nxt.items()})
    results: dict = {}
    for st, abd in layers[-1].items():
        _, first, _ = st
        for (a, b) in abd:
            tup = T(first[0], a, first[1], b)
            results.setdefault(tup, (st, (a, b)))
    final = gist_of(results)
    back = {}
    for tup in final:
        st, ab = results[tup]
        seq = []
        depth = len(layers) - 1
        while st is not None:
            pst, pab, gi, t = layers[depth][st][ab]
            seq.append((gi, t))
            st, ab = pst, pab
            depth -= 1
        seq.reverse()
        pools = [list(ix) for _, ix in groups]
        order = []
        for gi, t in seq:
            ci = pools[gi].pop(0)
            order.append((ci, t))
            for extra in extras.get(ci, ()):
                order.append((extra, children[extra][0]))
        back[tup] = order
    return final, back


def p_compose(children: Sequence[Gist], pole_m: tuple, k: int) -> Gist:
    """Parallel composition over every left-to-right order of the children."""
    return _p_compose(children, pole_m[0], pole_m[1])[0]


# ---------------------------------------------------------------------------
# Driver over an SPQR-tree
# ---------------------------------------------------------------------------


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 2 or k % 2:
        raise ValueError(f"k must be a positive even integer, got {k!r}")


def _check_rigid(rigid: str) -> None:
    if rigid not in ("reduction", "exhaustive"):
        raise ValueError(f"rigid must be 'reduction' or 'exhaustive', got {rigid!r}")


def _check_m(g: Digraph, m: Mapping, k: int) -> dict:
    out = {}
    for v in g.vertices:
        x = m.get(v, k)
        if x < 0 or x % 2 or x > k:
            raise ValueError(f"m({v!r}) = {x} is not an even value in [0, {k}]")
        out[v] = x
    return out


def _rigid_supported(g: Digraph, k: int) -> bool:
    return k == 4 and g.max_degree() <= 6


def tree_gists(tree: SPQRTree, m: Mapping, k: int, rigid: str = "reduction") -> dict:
    """Gist and back-pointers for every node, bottom-up.

    ``rigid`` is ``"reduction"`` (4-modality, degree <= 6 only) or
    ``"exhaustive"`` (brute force over skeleton selections, any k).
    """
    from . import rnode

    _check_rigid(rigid)
    g = tree.graph
    out: dict = {}
    for nd in tree.postorder():
        u, v = nd.poles
        if nd.kind == "Q":
            out[nd.index] = (_record(q_tuples(g, nd.edge, u, v), k), {})
            continue
        kids = [out[c.index][0] for c in nd.child_list()]
        if not all(kids):
            gist, back = (), {}
        elif nd.kind == "S":
            inner = [m[nd.ends[key][1]] for key in nd.path[:-1]]
            gist, back = _s_compose(kids, inner, m[u], m[v])
        elif nd.kind == "P":
            gist, back = _p_compose(kids, m[u], m[v])
        else:
            child_gists = {key: out[nd.children[key].index][0] for key in nd.keys}
            if rigid == "exhaustive":
                gist, back = rnode.r_tuples_brute(nd, child_gists, m)
            elif _rigid_supported(g, k):
                gist, back = rnode.r_tuples(nd, child_gists, m)
            else:
                raise UnsupportedInstance(
                    f"R-node with {len(nd.keys) + 1} skeleton edges needs k = 4 and max degree <= 6"
                )
        out[nd.index] = (_record(gist, k), back)
    return out


@dataclass
class _Real:
    rot: dict
    tail: list
    head: list


def assemble(nd: SPQRNode, rotation: Mapping, child_real: Mapping, rot: dict | None = None) -> _Real:
    """Glue child realizations along a skeleton rotation (parent key included).

    Rotations of inner vertices go into ``rot``, which callers may share
    across the whole tree to avoid copying.
    """
    u, v = nd.poles
    if rot is None:
        rot = {}
        for c in child_real.values():
            rot.update(c.rot)
    tail = head = None
    for x, keys in rotation.items():
        keys = list(keys)
        if x == u or x == v:
            i = keys.index(nd.parent_key)
            keys = keys[i + 1:] + keys[:i]
        flat: list = []
        for key in keys:
            cu, _ = nd.ends[key]
            real = child_real[key]
            flat.extend(real.tail if x == cu else real.head)
        if x == u:
            tail = flat
        elif x == v:
            head = flat
        else:
            rot[x] = flat
    return _Real(rot, tail, head)


def skeleton_rotation(nd: SPQRNode, choice) -> dict:
    """Rotation of the extended skeleton realising a recorded choice."""
    u, v = nd.poles
    pk = nd.parent_key
    if nd.kind == "S":
        rot = {u: [pk, nd.path[0]], v: [pk, nd.path[-1]]}
        for a, b in zip(nd.path, nd.path[1:]):
            rot[nd.ends[a][1]] = [a, b]
        return rot
    if nd.kind == "P":
        left_to_right = [nd.keys[i] for i, _ in choice]
        return {u: [pk] + left_to_right[::-1], v: [pk] + left_to_right}
    reflect, _ = choice
    if reflect:
        return {x: list(reversed(ks)) for x, ks in nd.rotation.items()}
    return {x: list(ks) for x, ks in nd.rotation.items()}


def measure(g: Digraph, real: _Real, u, v) -> EmbeddingTuple:
    ou = [g.orientation(e, u) for e in real.tail]
    ov = [g.orientation(e, v) for e in real.head]
    return T(ou[-1], count_alternations(ou, cyclic=False), ov[0], count_alternations(ov, cyclic=False))


def realize(tree: SPQRTree, gists: Mapping, root_tuple: EmbeddingTuple) -> _Real:
    """Rebuild an embedding of the root child's pertinent graph realising ``root_tuple``."""
    g = tree.graph
    chosen = {tree.root.index: root_tuple}
    choice_of: dict = {}
    for nd in tree.nodes:
        if nd.kind == "Q":
            continue
        t = chosen[nd.index]
        choice = gists[nd.index][1][t]
        choice_of[nd.index] = choice
        if nd.kind == "S":
            for key, ct in zip(nd.path, choice):
                chosen[nd.children[key].index] = ct
        elif nd.kind == "P":
            for i, ct in choice:
                chosen[nd.children[nd.keys[i]].index] = ct
        else:
            _, sel = choice
            for key in nd.keys:
                chosen[nd.children[key].index] = sel[key]
    reals: dict = {}
    inner: dict = {}
    for nd in tree.postorder():
        if nd.kind == "Q":
            real = _Real(inner, [nd.edge], [nd.edge])
        else:
            rot = skeleton_rotation(nd, choice_of[nd.index])
            real = assemble(nd, rot, {key: reals[c.index] for key, c in nd.children.items()}, inner)
            for c in nd.child_list():
                del reals[c.index]
        got = measure(g, real, *nd.poles)
        if got != chosen[nd.index]:
            raise AssertionError(f"node {nd.kind}#{nd.index} realised {got}, expected {chosen[nd.index]}")
        reals[nd.index] = real
    return reals[tree.root.index]


# ---------------------------------------------------------------------------
# Blocks and the block-cut tree
# ---------------------------------------------------------------------------


def _fan(g: Digraph, edges: Iterable, x):
    """Common orientation of ``edges`` at ``x``, or None if mixed."""
    os = {g.orientation(e, x) for e in edges}
    return next(iter(os)) if len(os) == 1 else None


def combined_modality(pieces: Sequence[tuple]) -> int:
    """Least cyclic modality at a cut vertex given per-block ``(c, fan)`` pairs.

    ``c`` is the block's own modality at the vertex; ``fan`` its common
    orientation there (``None`` if mixed).  Mixed blocks nest pairwise
    saving two alternations per nesting; uniform blocks are absorbed
    next to an edge of the same orientation.
    """
    mixed = [c for c, f in pieces if f is None]
    if mixed:
        return sum(mixed) - 2 * (len(mixed) - 1)
    fans = {f for _, f in pieces}
    return 0 if len(fans) <= 1 else 2


def _cap_for_block(own_fan, kids: Sequence[tuple], mw: int):
    """Largest modality the block may use at a cut vertex, or None if hopeless."""
    if own_fan is None:
        mixed = [c for c, f in kids if f is None]
        cap = mw - (sum(mixed) - 2 * (len(mixed) - 1)) + 2 if mixed else mw
        return cap if cap >= 2 else None
    if combined_modality(list(kids) + [(0, own_fan)]) > mw:
        return None
    return mw


@dataclass
class _BlockResult:
    c: int  # modality at the parent cut vertex
    fan: object
    rot: dict


def _block_tree(g: Digraph, edges: list, verts: list, pv):
    """SPQR-tree of a block rooted at an edge at ``pv`` (None for bridges)."""
    if len(edges) == 1:
        return None
    bg = g.subgraph(edges, verts)
    if pv is None:
        ref = edges[0]
        first = g.tail(ref)
    else:
        ref = next(e for e in edges if pv in g.ends(e))
        first = pv
    return spqr_tree(bg, ref, first_pole=first)


def _solve_block(g: Digraph, edges: list, tree, pv, m: Mapping, k: int, rigid: str, witness: bool = True):
    """Solve one block; ``pv`` is the parent cut vertex or None for the root block."""
    if tree is None:
        e = edges[0]
        t, h = g.ends(e)
        fan = g.orientation(e, pv) if pv is not None else None
        return _BlockResult(0, fan, {t: [e], h: [e]})
    ref = tree.ref_edge
    u, v = tree.root.poles
    gists = tree_gists(tree, m, k, rigid)
    s_rho = gists[tree.root.index][0]
    su, sv = g.orientation(ref, u), g.orientation(ref, v)
    best = None
    for t in s_rho:
        cu = pole_modality(t.s1, t.a, su)
        if pole_modality(t.s2, t.b, sv) > m[v] or cu > m[u]:
            continue
        if best is None or cu < best[0]:
            best = (cu, t)
    if best is None:
        return None
    rot: dict = {}
    if witness:
        real = realize(tree, gists, best[1])
        rot = dict(real.rot)
        rot[u] = [ref] + real.tail
        rot[v] = [ref] + real.head
    fan = _fan(g, [e for e in edges if pv in g.ends(e)], pv) if pv is not None else None
    return _BlockResult(best[0], fan, rot)


def merge_fans(g: Digraph, x, pieces: Sequence[list]) -> list:
    """Nest the blocks' cyclic edge orders at a cut vertex with least modality."""
    o = lambda e: g.orientation(e, x)  # noqa: E731
    mixed = [p for p in pieces if count_alternations([o(e) for e in p]) > 0]
    uniform = [p for p in pieces if count_alternations([o(e) for e in p]) == 0]
    if mixed:
        host = list(mixed[0])
        rest_mixed = mixed[1:]
    else:
        host = list(uniform[0])
        uniform = uniform[1:]
        rest_mixed = []
    for piece in rest_mixed:
        n = len(host)
        i = next(i for i in range(n) if o(host[i]) != o(host[(i + 1) % n]))
        want_first, want_last = o(host[i]), o(host[(i + 1) % n])
        j = next(j for j in range(len(piece)) if o(piece[j]) == want_first and o(piece[j - 1]) == want_last)
        host[i + 1:i + 1] = piece[j:] + piece[:j]
    for piece in uniform:
        s = o(piece[0])
        i = next((i for i in range(len(host)) if o(host[i]) == s), 0)
        host[i + 1:i + 1] = list(piece)
    return host


def _solve_connected(g: Digraph, m: Mapping, k: int, rigid: str, witness: bool = True):
    if g.m == 0:
        return {v: () for v in g.vertices}
    bc = bc_tree(g)
    # building every tree first rejects nonplanar input before any answer
    trees = {
        b: _block_tree(g, bc.blocks[b], bc.block_vertices[b], bc.parent_cut.get(b))
        for b in range(len(bc.blocks))
    }
    res: dict = {}
    for b in bc.postorder():
        edges, verts = bc.blocks[b], bc.block_vertices[b]
        pv = bc.parent_cut.get(b)
        mb = {x: m[x] for x in verts}
        for w in verts:
            if w == pv or not bc.children.get(w):
                continue
            own = _fan(g, [e for e in edges if w in g.ends(e)], w)
            kids = [(res[c].c, res[c].fan) for c in bc.children[w]]
            cap = _cap_for_block(own, kids, m[w])
            if cap is None:
                return None
            mb[w] = cap
        r = _solve_block(g, edges, trees[b], pv, mb, k, rigid, witness)
        if r is None:
            return None
        res[b] = r
    rot: dict = {}
    if not witness:
        return rot
    for v in g.vertices:
        pieces = [res[b].rot[v] for b in bc.blocks_at(v)]
        rot[v] = pieces[0] if len(pieces) == 1 else merge_fans(g, v, pieces)
    return rot


@contextmanager
def _gc_paused():
    # The solver allocates many short-lived acyclic objects; generational
    # collection passes over them add a superlinear term on large inputs.
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def _solve(g: Digraph, m: Mapping | None, k: int, rigid: str, witness: bool):
    _check_k(k)
    _check_rigid(rigid)
    if m is None:
        m = {v: k for v in g.vertices}
    m = _check_m(g, m, k)
    rot: dict = {}
    comps = g.components()
    with _gc_paused():
        for comp in comps:
            if len(comps) == 1:
                sub = g
            else:
                cs = set(comp)
                sub = g.subgraph([e for e, t, _ in g.edges if t in cs], comp)
            r = _solve_connected(sub, m, k, rigid, witness)
            if r is None:
                return None
            rot.update(r)
    if not witness:
        return True
    rs = RotationSystem(g, rot)
    if not is_planar_rotation(rs) or not satisfies_m(rs, m):
        raise AssertionError("internal error: witness failed verification")
    return rs


def find_embedding(g: Digraph, m: Mapping | None = None, k: int = 4, rigid: str = "reduction") -> RotationSystem | None:
    """An embedding of ``g`` satisfying ``m`` (default: ``k`` everywhere), or None.

    Vertices missing from ``m`` are bounded by ``k``.
    Raises :class:`UnsupportedInstance` when an R-node lies outside the
    handled regime, and ``NonplanarError`` for nonplanar input (detected on
    the rigid skeletons).  The witness is verified before it is returned.
    """
    return _solve(g, m, k, rigid, witness=True)


def max_modality(g: Digraph, m: Mapping, k: int, rigid: str = "reduction") -> bool:
    return _solve(g, m, k, rigid, witness=False) is not None


def max_modality_biconnected(g: Digraph, m: Mapping, k: int, rigid: str = "reduction") -> RotationSystem | None:
    """Decide a biconnected instance directly through the root test."""
    _check_k(k)
    m = _check_m(g, m, k)
    edges = g.edge_ids()
    r = _solve_block(g, edges, _block_tree(g, edges, list(g.vertices), None), None, m, k, rigid)
    if r is None:
        return None
    return RotationSystem(g, r.rot)


def k_modality(g: Digraph, k: int, rigid: str = "reduction") -> bool:
    return _solve(g, None, k, rigid, witness=False) is not None
