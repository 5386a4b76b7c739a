"""Block-cut trees and rooted SPQR-trees of directed multigraphs.

The SPQR construction peels series and parallel structure with a work
queue (linear time on series-parallel inputs) and splits the remaining
cores at separation pairs found by brute force, then merges adjacent
bonds and polygons into the canonical tree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .digraph import Digraph, GraphError, sort_key


class DecompositionError(GraphError):
    pass


class NonplanarError(DecompositionError):
    """The input digraph has no planar embedding."""


# ---------------------------------------------------------------------------
# Biconnectivity
# ---------------------------------------------------------------------------


def _blocks(vertices: Iterable, inc: dict, ends: dict) -> tuple[list[list], set]:
    """Edge sets of blocks and the articulation points (iterative Tarjan).

    ``inc[v]`` lists edge keys at ``v``; ``ends[key]`` gives the endpoints.
    Parallel edges are distinct keys; only the tree edge itself is skipped.
    """
    disc: dict = {}
    low: dict = {}
    blocks: list[list] = []
    cuts: set = set()
    counter = 0
    for root in vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        estack: list = []
        stack = [(root, None, iter(inc[root]))]
        nchild_root = 0
        while stack:
            v, pe, it = stack[-1]
            advanced = False
            for e in it:
                if e == pe:
                    continue
                a, b = ends[e]
                w = b if a == v else a
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    estack.append(e)
                    stack.append((w, e, iter(inc[w])))
                    if v == root:
                        nchild_root += 1
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    estack.append(e)
                    if disc[w] < low[v]:
                        low[v] = disc[w]
            if advanced:
                continue
            stack.pop()
            if not stack:
                break
            p = stack[-1][0]
            if low[v] < low[p]:
                low[p] = low[v]
            if low[v] >= disc[p]:
                blk = []
                while True:
                    x = estack.pop()
                    blk.append(x)
                    if x == pe:
                        break
                blocks.append(blk)
                if p != root:
                    cuts.add(p)
        if nchild_root > 1:
            cuts.add(root)
    return blocks, cuts


@dataclass
class BCTree:
    blocks: list  # list of edge-id lists
    block_vertices: list  # list of vertex lists
    cut_vertices: list
    root: int = 0
    parent_cut: dict = field(default_factory=dict)  # block index -> cut vertex (None at root)
    children: dict = field(default_factory=dict)  # cut vertex -> child block indices
    _at: dict | None = field(default=None, repr=False, compare=False)

    def blocks_at(self, v) -> list[int]:
        if self._at is None:
            self._at = {}
            for i, vs in enumerate(self.block_vertices):
                for x in vs:
                    self._at.setdefault(x, []).append(i)
        return list(self._at.get(v, ()))

    def postorder(self) -> list[int]:
        """Block indices, children before parents."""
        order = []
        stack = [(self.root, False)]
        while stack:
            b, done = stack.pop()
            if done:
                order.append(b)
                continue
            stack.append((b, True))
            for w in self.block_vertices[b]:
                if self.parent_cut.get(b) == w:
                    continue
                for c in self.children.get(w, ()):
                    stack.append((c, False))
        return order


def bc_tree(g: Digraph, root_block: int = 0) -> BCTree:
    if not g.is_connected():
        raise DecompositionError("bc_tree needs a connected graph")
    ends = {e: (t, h) for e, t, h in g.edges}
    inc = {v: g.incident(v) for v in g.vertices}
    raw, cuts = _blocks(g.vertices, inc, ends)
    order = {e: i for i, (e, _, _) in enumerate(g.edges)}
    raw = sorted((sorted(b, key=order.__getitem__) for b in raw), key=lambda b: order[b[0]])
    bverts = []
    for b in raw:
        seen: dict = {}
        for e in b:
            for x in ends[e]:
                seen.setdefault(x)
        bverts.append(list(seen))
    cut_list = [v for v in g.vertices if v in cuts]
    t = BCTree(raw, bverts, cut_list, root=root_block if raw else 0)
    if not raw:
        return t
    at: dict = {}
    for i, vs in enumerate(bverts):
        for v in vs:
            if v in cuts:
                at.setdefault(v, []).append(i)
    t.parent_cut = {root_block: None}
    queue = deque([root_block])
    while queue:
        b = queue.popleft()
        for w in bverts[b]:
            if w not in cuts or t.parent_cut[b] == w:
                continue
            kids = [c for c in at[w] if c != b and c not in t.parent_cut]
            t.children[w] = kids
            for c in kids:
                t.parent_cut[c] = w
                queue.append(c)
    return t


def is_biconnected(g: Digraph) -> bool:
    if g.n < 2 or not g.is_connected():
        return False
    return len(bc_tree(g).blocks) == 1


# ---------------------------------------------------------------------------
# Split components
# ---------------------------------------------------------------------------


class _Splitter:
    def __init__(self, ends: dict):
        self.ends = ends  # key -> (x, y), shared by all parts
        self.comps: list[tuple[str, list]] = []
        self.nvid = 0

    def new_virtual(self, x, y):
        key = ("v", self.nvid)
        self.nvid += 1
        self.ends[key] = (x, y)
        return key

    def run(self, keys: list) -> None:
        work = [keys]
        while work:
            core = self._reduce(work.pop())
            if core is not None:
                work.extend(self._split(core))

    def _reduce(self, keys: list):
        ends = self.ends
        adj: dict = {}
        for k in keys:
            x, y = ends[k]
            adj.setdefault(x, {}).setdefault(y, []).append(k)
            adj.setdefault(y, {}).setdefault(x, []).append(k)
        deg = {x: sum(len(ks) for ks in nb.values()) for x, nb in adj.items()}
        total = len(keys)
        queue: deque = deque()
        for x in sorted(adj, key=sort_key):
            if deg[x] == 2:
                queue.append(("s", x))
            for y, ks in adj[x].items():
                if len(ks) >= 2 and sort_key(x) < sort_key(y):
                    queue.append(("p", x, y))

        def add(key):
            x, y = ends[key]
            adj[x].setdefault(y, []).append(key)
            adj[y].setdefault(x, []).append(key)
            deg[x] += 1
            deg[y] += 1
            if len(adj[x][y]) >= 2:
                queue.append(("p", x, y))

        def remove(key):
            x, y = ends[key]
            adj[x][y].remove(key)
            adj[y][x].remove(key)
            if not adj[x][y]:
                del adj[x][y]
                del adj[y][x]
            deg[x] -= 1
            deg[y] -= 1

        while queue:
            item = queue.popleft()
            if item[0] == "p":
                _, x, y = item
                ks = list(adj.get(x, {}).get(y, ()))
                if len(ks) < 2 or total == len(ks):
                    continue
                vkey = self.new_virtual(x, y)
                self.comps.append(("P", ks + [vkey]))
                for k in ks:
                    remove(k)
                add(vkey)
                total -= len(ks) - 1
                for z in (x, y):
                    if deg[z] == 2:
                        queue.append(("s", z))
            else:
                w = item[1]
                if w not in deg or deg[w] != 2 or total <= 3:
                    continue
                if len(adj[w]) != 2:
                    continue  # both edges go to the same neighbour: parallel pair
                (x, kx), (y, ky) = adj[w].items()
                k1, k2 = kx[0], ky[0]
                vkey = self.new_virtual(x, y)
                self.comps.append(("S", [k1, k2, vkey]))
                remove(k1)
                remove(k2)
                del adj[w], deg[w]
                add(vkey)
                total -= 1
                for z in (x, y):
                    if deg[z] == 2:
                        queue.append(("s", z))
        remaining = [k for x in adj for y, ks in adj[x].items() if sort_key(x) < sort_key(y) for k in ks]
        verts = [x for x in adj if deg[x] > 0]
        if len(verts) == 2:
            self.comps.append(("P", remaining))
            return None
        if all(deg[x] == 2 for x in verts):
            self.comps.append(("S", remaining))
            return None
        return remaining

    def _split(self, keys: list) -> list[list]:
        ends = self.ends
        inc: dict = {}
        for k in keys:
            for x in ends[k]:
                inc.setdefault(x, []).append(k)
        verts = sorted(inc, key=sort_key)
        for a in verts:
            sub_inc = {x: [k for k in ks if a not in ends[k]] for x, ks in inc.items() if x != a}
            sub_keys = {k: ends[k] for k in keys if a not in ends[k]}
            _, cuts = _blocks(sorted(sub_inc, key=sort_key), sub_inc, sub_keys)
            if not cuts:
                continue
            b = min(cuts, key=sort_key)
            # one connected component of G - {a, b}
            start = next(x for x in verts if x not in (a, b))
            comp = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for k in inc[x]:
                    p, q = ends[k]
                    y = q if p == x else p
                    if y not in comp and y not in (a, b):
                        comp.add(y)
                        stack.append(y)
            part1 = [k for k in keys if ends[k][0] in comp or ends[k][1] in comp]
            s1 = set(part1)
            part2 = [k for k in keys if k not in s1]
            v1 = self.new_virtual(a, b)
            # the same virtual edge lives in both halves
            return [part1 + [v1], part2 + [v1]]
        self.comps.append(("R", keys))
        return []


def split_components(g: Digraph) -> tuple[list[tuple[str, list]], dict]:
    """Canonical triconnected components of a biconnected multigraph.

    Returns ``(components, ends)`` where each component is ``(kind, keys)``
    with kind in ``S``/``P``/``R``; keys are ``("r", eid)`` for real edges
    and ``("v", i)`` for virtual edges, each virtual key shared by two
    components.
    """
    ends = {("r", e): (t, h) for e, t, h in g.edges}
    sp = _Splitter(ends)
    if g.m == 1:
        return [], ends
    sp.run([("r", e) for e, _, _ in g.edges])
    comps = sp.comps
    # merge adjacent bonds and adjacent polygons
    owner: dict = {}
    for i, (_, keys) in enumerate(comps):
        for k in keys:
            if k[0] == "v":
                owner.setdefault(k, []).append(i)
    parent = list(range(len(comps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    internal = set()
    for k, (i, j) in owner.items():
        if comps[i][0] == comps[j][0] and comps[i][0] in "SP":
            internal.add(k)
            parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(len(comps)):
        groups.setdefault(find(i), []).append(i)
    merged = []
    for root in sorted(groups):
        idx = groups[root]
        kind = comps[idx[0]][0]
        keys = [k for i in idx for k in comps[i][1] if k not in internal]
        merged.append((kind, keys))
    return merged, ends


# ---------------------------------------------------------------------------
# st-numbering
# ---------------------------------------------------------------------------


def st_numbering(vertices: list, ends: dict, keys: list, s, t, st_key) -> dict:
    """st-numbering of a biconnected multigraph (Tarjan's list insertion)."""
    inc: dict = {v: [] for v in vertices}
    for k in keys:
        x, y = ends[k]
        inc[x].append(k)
        inc[y].append(k)
    inc[s].remove(st_key)
    inc[s].insert(0, st_key)
    pre = {s: 0}
    lowv = {s: s}
    parent = {s: None}
    order = [s]
    stack = [(s, None, iter(inc[s]))]
    while stack:
        v, pe, it = stack[-1]
        advanced = False
        for k in it:
            if k == pe:
                continue
            x, y = ends[k]
            w = y if x == v else x
            if w not in pre:
                pre[w] = len(order)
                order.append(w)
                parent[w] = v
                lowv[w] = w
                stack.append((w, k, iter(inc[w])))
                advanced = True
                break
            if pre[w] < pre[lowv[v]]:
                lowv[v] = w
        if advanced:
            continue
        stack.pop()
        if stack:
            p = stack[-1][0]
            if pre[lowv[v]] < pre[lowv[p]]:
                lowv[p] = lowv[v]
    if order[1] != t:
        raise DecompositionError("st-numbering: t must be the first child of s")
    nxt = {s: t, t: None}
    prv = {s: None, t: s}
    sign = {s: -1}
    for v in order[2:]:
        p = parent[v]
        if sign[lowv[v]] == -1:
            a, b = prv[p], p
            sign[p] = 1
        else:
            a, b = p, nxt[p]
            sign[p] = -1
        nxt[a] = v
        prv[v] = a
        nxt[v] = b
        if b is not None:
            prv[b] = v
        sign.setdefault(v, 0)
    num = {}
    x, i = s, 0
    while x is not None:
        num[x] = i
        i += 1
        x = nxt[x]
    return num


# ---------------------------------------------------------------------------
# Rooted SPQR-tree
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class SPQRNode:
    kind: str  # "S", "P", "R" or "Q"
    poles: tuple  # (u, v); skeleton edges are oriented from u towards v
    parent_key: tuple
    keys: list = field(default_factory=list)  # child keys of the skeleton
    ends: dict = field(default_factory=dict)  # key -> (tail, head) incl. parent key
    children: dict = field(default_factory=dict)  # key -> SPQRNode
    path: list = field(default_factory=list)  # S-nodes: keys in order from u to v
    rotation: dict | None = None  # R-nodes: vertex -> cyclic key order
    edge: object = None  # Q-nodes: real edge id
    index: int = -1

    def vertices(self) -> list:
        seen: dict = {}
        for k in [self.parent_key] + self.keys:
            for x in self.ends[k]:
                seen.setdefault(x)
        return list(seen)

    def child_list(self) -> list:
        return [self.children[k] for k in self.keys]


@dataclass(eq=False)
class SPQRTree:
    graph: Digraph
    ref_edge: object
    root: SPQRNode  # the unique child of the reference edge's Q-node
    nodes: list  # all nodes, parents before children

    def postorder(self) -> list:
        return list(reversed(self.nodes))

    def node_counts(self) -> dict:
        out = {"S": 0, "P": 0, "Q": 0, "R": 0}
        for nd in self.nodes:
            out[nd.kind] += 1
        return out


def _skeleton_faces_ok(vertices, ends, keys, rotation) -> bool:
    pos = {v: {k: i for i, k in enumerate(seq)} for v, seq in rotation.items()}
    seen = set()
    faces = 0
    for k in keys:
        for start in ((k, ends[k][0]), (k, ends[k][1])):
            if start in seen:
                continue
            faces += 1
            d = start
            while d not in seen:
                seen.add(d)
                kk, x = d
                a, b = ends[kk]
                y = b if x == a else a
                seq = rotation[y]
                d = (seq[(pos[y][kk] + 1) % len(seq)], y)
    return len(vertices) - len(keys) + faces == 2


def _rigid_rotation(vertices, ends, keys) -> dict:
    g = nx.Graph()
    lookup = {}
    for k in keys:
        x, y = ends[k]
        if g.has_edge(x, y):
            raise DecompositionError("rigid skeleton is not simple")
        g.add_edge(x, y)
        lookup[(x, y)] = lookup[(y, x)] = k
    ok, emb = nx.check_planarity(g)
    if not ok:
        raise NonplanarError("graph is not planar")
    rot = {v: [lookup[(v, w)] for w in emb.neighbors_cw_order(v)] for v in vertices}
    if not _skeleton_faces_ok(vertices, ends, keys, rot):
        raise DecompositionError("rigid skeleton embedding failed face validation")
    return rot


def spqr_tree(g: Digraph, ref_edge=None, first_pole=None) -> SPQRTree:
    """Rooted SPQR-tree of a biconnected planar digraph.

    ``first_pole`` selects which endpoint of the reference edge is the
    first pole of the root child (default: the tail).
    """
    if g.m < 2 or not is_biconnected(g):
        raise DecompositionError("spqr_tree needs a biconnected graph with at least two edges")
    if ref_edge is None:
        ref_edge = g.edges[0][0]
    comps, ends = split_components(g)
    rkey = ("r", ref_edge)
    t, h = g.ends(ref_edge)
    if first_pole is None:
        first_pole = t
    u0, v0 = (t, h) if first_pole == t else (h, t)
    owner: dict = {}
    for i, (_, keys) in enumerate(comps):
        for k in keys:
            owner.setdefault(k, []).append(i)

    nodes: list[SPQRNode] = []

    def make(kind_keys_idx, pkey, poles) -> SPQRNode:
        kind, keys = comps[kind_keys_idx]
        child_keys = [k for k in keys if k != pkey]
        nd = SPQRNode(kind=kind, poles=poles, parent_key=pkey, keys=child_keys)
        u, v = poles
        nd.ends[pkey] = poles
        if kind == "P":
            for k in child_keys:
                nd.ends[k] = (u, v)
        elif kind == "S":
            inc: dict = {}
            for k in child_keys:
                for x in ends[k]:
                    inc.setdefault(x, []).append(k)
            x, prev = u, None
            path = []
            while x != v:
                k = next(kk for kk in inc[x] if kk != prev)
                a, b = ends[k]
                y = b if a == x else a
                nd.ends[k] = (x, y)
                path.append(k)
                prev, x = k, y
            nd.path = path
            nd.keys = path
        else:
            seen: dict = {}
            for k in keys:
                for x in ends[k]:
                    seen.setdefault(x)
            verts = list(seen)
            num = st_numbering(verts, {**{k: ends[k] for k in keys}, pkey: poles}, keys, u, v, pkey)
            for k in child_keys:
                a, b = ends[k]
                nd.ends[k] = (a, b) if num[a] < num[b] else (b, a)
            nd.rotation = _rigid_rotation(verts, ends, keys)
        return nd

    def q_node(key, poles) -> SPQRNode:
        return SPQRNode(kind="Q", poles=poles, parent_key=key, ends={key: poles}, edge=key[1])

    if not comps:
        raise DecompositionError("no components")
    ci = owner[rkey][0]
    if len(comps[ci][1]) == 2:
        other = next(k for k in comps[ci][1] if k != rkey)
        root = q_node(other, (u0, v0))
        nodes.append(root)
        work = []
    else:
        root = make(ci, rkey, (u0, v0))
        nodes.append(root)
        work = [(root, ci)]
    while work:
        nd, ci = work.pop()
        for k in nd.keys:
            poles = nd.ends[k]
            if k[0] == "r":
                child = q_node(k, poles)
            else:
                cj = next(j for j in owner[k] if j != ci)
                child = make(cj, k, poles)
                work.append((child, cj))
            nd.children[k] = child
            nodes.append(child)
    # parents before children
    ordered = []
    stack = [root]
    while stack:
        nd = stack.pop()
        nd.index = len(ordered)
        ordered.append(nd)
        stack.extend(reversed(nd.child_list()))
    return SPQRTree(g, ref_edge, root, ordered)


def pertinent_edges(tree: SPQRTree) -> dict:
    """Map node index -> list of real edge ids of its pertinent graph."""
    out: dict = {}
    for nd in tree.postorder():
        if nd.kind == "Q":
            out[nd.index] = [nd.edge]
        else:
            out[nd.index] = [e for c in nd.child_list() for e in out[c.index]]
    return out


def pertinent(tree: SPQRTree, node: SPQRNode) -> tuple[Digraph, tuple]:
    """Pertinent digraph of ``node`` and its poles."""
    stack, es = [node], []
    while stack:
        nd = stack.pop()
        if nd.kind == "Q":
            es.append(nd.edge)
        else:
            stack.extend(nd.child_list())
    return tree.graph.subgraph(es), node.poles


def dump_tree(tree: SPQRTree) -> str:
    lines = []

    def rec(nd, depth):
        label = f"{nd.kind}#{nd.index} poles={nd.poles[0]}->{nd.poles[1]}"
        if nd.kind == "Q":
            label += f" edge={nd.edge}"
        lines.append("  " * depth + label)
        for c in nd.child_list():
            rec(c, depth + 1)

    lines.append(f"ref edge {tree.ref_edge}")
    rec(tree.root, 1)
    return "\n".join(lines) + "\n"


def tree_to_dot(tree: SPQRTree) -> str:
    out = ["digraph SPQR {"]
    for nd in tree.nodes:
        extra = f" e{nd.edge}" if nd.kind == "Q" else ""
        out.append(f'  n{nd.index} [label="{nd.kind}{extra} {nd.poles[0]},{nd.poles[1]}"];')
    for nd in tree.nodes:
        for c in nd.child_list():
            out.append(f"  n{nd.index} -> n{c.index};")
    out.append("}")
    return "\n".join(out) + "\n"
