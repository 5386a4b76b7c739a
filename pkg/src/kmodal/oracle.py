"""Exhaustive reference solvers and random instance generators.

The oracle never uses the decomposition machinery: it enumerates planar
rotation systems by inserting edges one at a time into faces of the
current partial embedding.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from typing import Iterator, Mapping

import networkx as nx

from .digraph import Digraph, RotationSystem, count_alternations, is_planar_rotation, sort_key


class BudgetExceeded(RuntimeError):
    pass


def _edge_order(g: Digraph, comp: list) -> tuple:
    top = max(g.degree(v) for v in comp)
    root = min((v for v in comp if g.degree(v) == top), key=sort_key)
    order, seen_v, seen_e = [], {root}, set()
    q = deque([root])
    while q:
        x = q.popleft()
        for e in g.incident(x):
            if e in seen_e:
                continue
            seen_e.add(e)
            order.append(e)
            y = g.other(e, x)
            if y not in seen_v:
                seen_v.add(y)
                q.append(y)
    return root, order


def _corners(rot: dict, g: Digraph) -> list:
    """Faces of a partial embedding as lists of corners ``(vertex, index)``.

    Corner ``(y, i)`` is the gap right after ``rot[y][i]``.
    """
    pos = {(y, e): i for y, es in rot.items() for i, e in enumerate(es)}
    seen = set()
    faces = []
    for y0, es in rot.items():
        for e0 in es:
            start = (e0, g.other(e0, y0))  # dart entering y0 along e0
            if start in seen:
                continue
            face = []
            dart = start
            while dart not in seen:
                seen.add(dart)
                e, x = dart
                y = g.other(e, x)
                i = pos[(y, e)]
                face.append((y, i))
                nxt = rot[y][(i + 1) % len(rot[y])]
                dart = (nxt, y)
            faces.append(face)
    return faces


def _partial_modality(rot: dict, g: Digraph, x) -> int:
    return count_alternations([g.orientation(e, x) for e in rot[x]])


def _search(g: Digraph, comp: list, bound: Mapping | None, budget: int, first_only: bool) -> Iterator[dict]:
    root, order = _edge_order(g, comp)
    root_first3 = [e for e in order if root in g.ends(e)][:3]
    count = [0]

    def canonical(rot):
        if len(root_first3) < 3 or not all(e in rot[root] for e in root_first3):
            return True
        r = rot[root]
        idx = [r.index(e) for e in root_first3]
        n = len(r)
        return (idx[1] - idx[0]) % n < (idx[2] - idx[0]) % n

    def ok(rot, touched):
        if bound is None:
            return True
        return all(_partial_modality(rot, g, x) <= bound[x] for x in touched)

    def rec(i, rot):
        count[0] += 1
        if count[0] > budget:
            raise BudgetExceeded(f"oracle explored more than {budget} partial embeddings")
        if i == len(order):
            yield {x: list(es) for x, es in rot.items()}
            return
        e = order[i]
        a, b = g.ends(e)
        if b in rot and a not in rot:
            a, b = b, a
        if b not in rot:
            ra = rot[a]
            for j in range(max(1, len(ra))):
                new = dict(rot)
                new[a] = ra[:j + 1] + [e] + ra[j + 1:]
                new[b] = [e]
                if ok(new, (a, b)) and canonical(new):
                    yield from rec(i + 1, new)
            return
        for face in _corners(rot, g):
            ca = [c for c in face if c[0] == a]
            cb = [c for c in face if c[0] == b]
            for (_, ia), (_, ib) in itertools.product(ca, cb):
                new = dict(rot)
                new[a] = rot[a][:ia + 1] + [e] + rot[a][ia + 1:]
                new[b] = rot[b][:ib + 1] + [e] + rot[b][ib + 1:]
                if ok(new, (a, b)) and canonical(new):
                    yield from rec(i + 1, new)

    if not order:
        yield {v: [] for v in comp}
        return
    yield from rec(0, {root: []})


def _components(g: Digraph) -> list:
    return [c for c in g.components()]


def enumerate_planar_embeddings(g: Digraph, budget: int = 10**6) -> Iterator[RotationSystem]:
    """All planar rotation systems of a connected digraph, one per mirror pair."""
    comps = _components(g)
    if len(comps) != 1:
        raise ValueError("enumerate_planar_embeddings expects a connected digraph")
    for rot in _search(g, comps[0], None, budget, False):
        yield RotationSystem(g, rot)


def enumerate_rotation_systems_naive(g: Digraph) -> Iterator[RotationSystem]:
    """Planar rotation systems by filtering every rotation system, one per mirror pair."""
    verts = list(g.vertices)
    choices = []
    for v in verts:
        inc = list(g.incident(v))
        if len(inc) <= 1:
            choices.append([tuple(inc)])
        else:
            choices.append([(inc[0],) + p for p in itertools.permutations(inc[1:])])
    seen = set()
    for combo in itertools.product(*choices):
        rs = RotationSystem(g, dict(zip(verts, combo)))
        if not is_planar_rotation(rs):
            continue
        key = tuple(_canon_cycle(rs[v]) for v in verts)
        mirror = tuple(_canon_cycle(tuple(reversed(rs[v]))) for v in verts)
        if mirror in seen:
            continue
        seen.add(key)
        yield rs


def _canon_cycle(seq: tuple) -> tuple:
    if not seq:
        return seq
    i = min(range(len(seq)), key=lambda j: sort_key(seq[j]))
    return tuple(seq[i:]) + tuple(seq[:i])


def find_embedding_bounded(g: Digraph, m: Mapping, budget: int = 10**6) -> RotationSystem | None:
    """Some planar embedding meeting ``m`` at every vertex, by exhaustive search."""
    rot: dict = {}
    for comp in _components(g):
        found = next(_search(g, comp, m, budget, True), None)
        if found is None:
            return None
        rot.update(found)
    return RotationSystem(g, rot)


def min_modality(g: Digraph, budget: int = 10**6) -> int | None:
    """Least k with a planar k-modal embedding (None if nonplanar)."""
    best = 0
    for comp in _components(g):
        top = max([g.degree(v) for v in comp] + [0])
        top += top % 2
        for k in range(best, top + 1, 2):
            if next(_search(g, comp, {v: k for v in comp}, budget, True), None) is not None:
                best = k
                break
        else:
            return None
    return best


def oracle_max_modality(g: Digraph, m: Mapping, budget: int = 10**6) -> bool:
    return find_embedding_bounded(g, m, budget) is not None


def oracle_k_modality(g: Digraph, k: int, budget: int = 10**6) -> bool:
    return find_embedding_bounded(g, {v: k for v in g.vertices}, budget) is not None


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _orient(rng: random.Random, pairs) -> list:
    return [(i, a, b) if rng.random() < 0.5 else (i, b, a) for i, (a, b) in enumerate(pairs)]


def gen_series_parallel(n: int, seed: int = 0, max_degree: int | None = None) -> Digraph:
    """Random biconnected series-parallel digraph on ``n`` vertices."""
    rng = random.Random(seed)
    if n <= 1:
        return Digraph.build(range(max(n, 0)), [])
    if n == 2:
        return Digraph.build(range(2), _orient(rng, [(0, 1)]))
    pairs = [(0, 1), (1, 2), (0, 2)]
    deg = [2, 2, 2]
    while len(deg) < n:
        i = rng.randrange(len(pairs))
        u, v = pairs[i]
        w = len(deg)
        can_par = max_degree is None or (deg[u] < max_degree and deg[v] < max_degree)
        if can_par and rng.random() < 0.5:
            pairs.append((u, w))
            pairs.append((w, v))
            deg[u] += 1
            deg[v] += 1
        else:
            pairs[i] = (u, w)
            pairs.append((w, v))
        deg.append(2)
    return Digraph.build(range(n), _orient(rng, pairs))


def _triangulated_polygon_chords(n: int, rng: random.Random) -> list:
    chords = []
    stack = [list(range(n))]
    while stack:
        poly = stack.pop()
        if len(poly) <= 3:
            continue
        i = rng.randrange(len(poly))
        j = (i + rng.randrange(2, len(poly) - 1)) % len(poly)
        i, j = min(i, j), max(i, j)
        chords.append((poly[i], poly[j]))
        stack.append(poly[i:j + 1])
        stack.append(poly[j:] + poly[:i + 1])
    return chords


def gen_outerplanar(n: int, seed: int = 0, keep: float = 0.5, drop_cycle: float = 0.1) -> Digraph:
    """Random connected outerplanar digraph on ``n`` vertices."""
    rng = random.Random(seed)
    if n <= 2:
        return Digraph.build(range(n), _orient(rng, [(0, 1)] if n == 2 else []))
    cycle = [(i, (i + 1) % n) for i in range(n)]
    chords = [c for c in _triangulated_polygon_chords(n, rng) if rng.random() < keep]
    pairs = []
    uf = list(range(n))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    extra = []
    for a, b in chords + cycle:
        if a == b:
            continue
        if (a, b) in cycle and rng.random() < drop_cycle:
            extra.append((a, b))
            continue
        pairs.append((a, b))
        uf[find(a)] = find(b)
    for a, b in extra:
        if find(a) != find(b):
            pairs.append((a, b))
            uf[find(a)] = find(b)
    rng.shuffle(pairs)
    return Digraph.build(range(n), _orient(rng, pairs))


def is_outerplanar(g: Digraph) -> bool:
    h = g.underlying()
    apex = ("apex",)
    h.add_node(apex)
    for v in g.vertices:
        h.add_edge(apex, v)
    return nx.check_planarity(h)[0]


def gen_planar_bounded_degree(n: int, max_degree: int, seed: int = 0, density: float = 0.8) -> Digraph:
    """Random connected planar digraph with maximum degree ``max_degree``.

    Starts from a random triangulation built by face insertion with edge
    flips, then deletes edges while keeping the graph connected.
    """
    rng = random.Random(seed)
    if n <= 3:
        base = [(i, j) for i in range(n) for j in range(i + 1, n)]
        return Digraph.build(range(n), _orient(rng, base))
    pts = nx.Graph()
    pts.add_edges_from([(0, 1), (1, 2), (0, 2)])
    faces = [(0, 1, 2), (0, 2, 1)]
    for w in range(3, n):
        fi = rng.randrange(len(faces))
        a, b, c = faces.pop(fi)
        pts.add_edges_from([(w, a), (w, b), (w, c)])
        faces += [(a, b, w), (b, c, w), (c, a, w)]
    h = pts
    edges = list(h.edges())
    rng.shuffle(edges)
    for a, b in edges:
        over = h.degree(a) > max_degree or h.degree(b) > max_degree
        if not over and rng.random() < density:
            continue
        h.remove_edge(a, b)
        if not nx.has_path(h, a, b):
            h.add_edge(a, b)
    # fall back to a spanning tree subset if the cap is still violated
    if max(d for _, d in h.degree()) > max_degree:
        for a, b in list(h.edges()):
            if h.degree(a) > max_degree or h.degree(b) > max_degree:
                h.remove_edge(a, b)
                if not nx.has_path(h, a, b):
                    h.add_edge(a, b)
    pairs = sorted(h.edges())
    rng.shuffle(pairs)
    return Digraph.build(range(n), _orient(rng, pairs))


def random_orientation(g: Digraph, seed: int) -> Digraph:
    rng = random.Random(seed)
    return Digraph.build(g.vertices, [(e, t, h) if rng.random() < 0.5 else (e, h, t) for e, t, h in g.edges])


def all_orientations(g: Digraph) -> Iterator[Digraph]:
    for bits in itertools.product((0, 1), repeat=g.m):
        yield Digraph.build(
            g.vertices, [(e, t, h) if f == 0 else (e, h, t) for (e, t, h), f in zip(g.edges, bits)]
        )


def gen_two_occurrence_formula(nvars: int, nclauses: int, seed: int = 0, max_size: int = 4):
    """Random two-occurrence formula whose clauses use distinct variables."""
    from .naesat import Formula

    rng = random.Random(seed)
    slots = [v for v in range(1, nvars + 1) for _ in range(2)]
    rng.shuffle(slots)
    slots = slots[: rng.randint(min(len(slots), 2 * nclauses), len(slots))]
    clauses: list = [[] for _ in range(nclauses)]
    for v in slots:
        opts = [c for c in clauses if v not in {abs(x) for x in c} and len(c) < max_size]
        if not opts:
            continue
        rng.choice(opts).append(v if rng.random() < 0.5 else -v)
    clauses = [tuple(c) for c in clauses if len(c) >= 2]
    return Formula(nvars, tuple(clauses))


def enumerate_two_occurrence_formulas(nclauses: int, nvars: int, complement: bool = False):
    """Every two-occurrence formula with exactly these counts, up to symmetry.

    A variable occurs once, or in two distinct clauses with equal or
    opposite signs.  Variables are interchangeable and may be negated,
    so a formula is a multiset of such occurrence types; clauses are
    listed by non-increasing size, which leaves one representative per
    class of clause permutations that preserve sizes.  Every clause is
    non-empty and every variable occurs.

    With ``complement`` the formulas are further taken up to negating all
    literals of a clause, which preserves its not-all-equal constraint:
    an occurrence pair that joins two clause groups not yet linked by
    earlier variables is then always given equal signs.
    """
    from .naesat import Formula

    types = [(i,) for i in range(nclauses)]
    types += [(i, j, rel) for i in range(nclauses) for j in range(i + 1, nclauses) for rel in (1, -1)]
    sizes = [0] * nclauses
    chosen: list = []
    comp = list(range(nclauses))

    def find(i):
        while comp[i] != i:
            i = comp[i]
        return i

    def rec(start: int, left: int):
        if left == 0:
            if all(sizes[i] >= sizes[i + 1] for i in range(nclauses - 1)) and sizes[-1] > 0:
                clauses: list = [[] for _ in range(nclauses)]
                for v, t in enumerate(chosen, 1):
                    clauses[t[0]].append(v)
                    if len(t) == 3:
                        clauses[t[1]].append(v * t[2])
                yield Formula(nvars, tuple(tuple(c) for c in clauses))
            return
        if 2 * left < sum(1 for s in sizes if s == 0):
            return
        for ti in range(start, len(types)):
            t = types[ti]
            touched = (t[0],) if len(t) == 1 else t[:2]
            joined = None
            if complement and len(t) == 3:
                ri, rj = find(t[0]), find(t[1])
                if ri != rj:
                    if t[2] < 0:
                        continue
                    joined = (max(ri, rj), min(ri, rj))
                    comp[joined[0]] = joined[1]
            chosen.append(t)
            for i in touched:
                sizes[i] += 1
            yield from rec(ti, left - 1)
            for i in touched:
                sizes[i] -= 1
            chosen.pop()
            if joined:
                comp[joined[0]] = joined[0]

    if nclauses >= 1 and nvars >= 1:
        yield from rec(0, nvars)


def _cubic_planar(n_faces: int, rng: random.Random) -> tuple:
    """Dual of a random stacked triangulation: a cubic planar graph and its rotation."""
    tri = nx.Graph()
    tri.add_edges_from([(0, 1), (1, 2), (0, 2)])
    faces = [(0, 1, 2), (0, 2, 1)]
    w = 3
    while len(faces) < n_faces:
        a, b, c = faces.pop(rng.randrange(len(faces)))
        tri.add_edges_from([(w, a), (w, b), (w, c)])
        faces += [(a, b, w), (b, c, w), (c, a, w)]
        w += 1
    side: dict = {}
    for fi, f in enumerate(faces):
        for i in range(3):
            side.setdefault(frozenset((f[i], f[(i + 1) % 3])), []).append(fi)
    dual = nx.MultiGraph()
    dual.add_nodes_from(range(len(faces)))
    for fs in side.values():
        dual.add_edge(fs[0], fs[1])
    ok, emb = nx.check_planarity(nx.Graph(dual))
    assert ok
    return dual, emb


def gen_good_skel_instance(size: int, seed: int = 0, irreducible: float = 0.7):
    """Random good skeleton instance on a cubic planar graph with ``size`` vertices."""
    from .digraph import INN, OUT
    from .rnode import SkelInstance
    from .tuples import EmbeddingTuple

    rng = random.Random(seed)
    size = max(4, size + size % 2)
    dual, emb = _cubic_planar(size, rng)
    ends, key_of = {}, {}
    for i, (a, b) in enumerate(sorted(nx.Graph(dual).edges())):
        t, h = (a, b) if rng.random() < 0.5 else (b, a)
        ends[i] = (t, h)
        key_of[frozenset((a, b))] = i
    rotation = {x: [key_of[frozenset((x, y))] for y in emb.neighbors_cw_order(x)] for x in emb.nodes}

    def pair_set():
        r = rng.random()
        if r < irreducible:
            return [(INN, 1), (OUT, 1)]
        if r < irreducible + (1 - irreducible) / 2:
            return [(rng.choice((INN, OUT)), 0)]
        return [(rng.choice((INN, OUT)), 1)]

    sets = {}
    for key, (t, h) in ends.items():
        pt, ph = pair_set(), pair_set()
        if len(pt) == 2 and len(ph) == 2:
            mode = rng.choice(("same", "cross", "full", "three"))
            if mode == "same":
                rel = [(pt[0], ph[0]), (pt[1], ph[1])]
            elif mode == "cross":
                rel = [(pt[0], ph[1]), (pt[1], ph[0])]
            elif mode == "full":
                rel = [(p, q) for p in pt for q in ph]
            else:
                rel = [(p, q) for p in pt for q in ph]
                rel.pop(rng.randrange(4))
        else:
            rel = [(p, q) for p in pt for q in ph]
        sets[key] = [EmbeddingTuple(p[0], p[1], q[0], q[1]) for p, q in rel]
    m = {x: 4 if rng.random() < 0.9 else 2 for x in rotation}
    return SkelInstance(sorted(rotation), ends, rotation, sets, m, set())
