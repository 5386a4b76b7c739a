"""Hybrid planarity for graphs whose clusters are frames of two vertices.

A c-graph partitions its vertices into clusters of one or two vertices.
Each vertex carries a label ``inn`` or ``out`` telling on which side of
its cluster's frame the vertex sits; a two-vertex cluster has one of
each.  The canonical digraph has a vertex per cluster and a dummy per
inter-cluster edge; the label of an endpoint orients the half-edge.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .decompose import NonplanarError
from .digraph import Digraph, GraphError, ParseError, _lines, parse_id
from .tuples import k_modality


@dataclass
class CGraph:
    vertices: list
    cluster: dict  # vertex -> cluster id
    label: dict  # vertex -> "inn" | "out"
    edges: list = field(default_factory=list)  # undirected (a, b)

    def __post_init__(self):
        members: dict = {}
        for v in self.vertices:
            if self.label.get(v) not in ("inn", "out"):
                raise GraphError(f"vertex {v!r} needs label inn or out")
            members.setdefault(self.cluster[v], []).append(v)
        for c, vs in members.items():
            if len(vs) > 2:
                raise GraphError(f"cluster {c!r} has more than two vertices")
            if len(vs) == 2 and {self.label[x] for x in vs} != {"inn", "out"}:
                raise GraphError(f"cluster {c!r} needs one inn and one out vertex")
        known = set(self.vertices)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise GraphError(f"edge ({a!r}, {b!r}) uses an undeclared vertex")
            if a == b:
                raise GraphError(f"self-loop at {a!r}")

    def clusters(self) -> list:
        seen: list = []
        for v in self.vertices:
            if self.cluster[v] not in seen:
                seen.append(self.cluster[v])
        return seen

    def inter_edges(self) -> list:
        return [(a, b) for a, b in self.edges if self.cluster[a] != self.cluster[b]]


def canonical_digraph(c: CGraph) -> Digraph:
    """Cluster vertices plus a dummy per inter-cluster edge."""
    verts = list(c.clusters())
    edges = []
    for i, (a, b) in enumerate(c.inter_edges()):
        d = ("d", i)
        verts.append(d)
        for x in (a, b):
            cx = c.cluster[x]
            edges.append((cx, d) if c.label[x] == "out" else (d, cx))
    return Digraph.build(verts, edges)


def canonical_cgraph(g: Digraph) -> CGraph:
    """Inverse construction: each vertex becomes a frame of two vertices."""
    verts, cluster, label, edges = [], {}, {}, []
    for v in g.vertices:
        for side in ("inn", "out"):
            x = f"{v}[{side}]"
            verts.append(x)
            cluster[x] = v
            label[x] = side
        edges.append((f"{v}[inn]", f"{v}[out]"))
    for _, t, h in g.edges:
        edges.append((f"{t}[out]", f"{h}[inn]"))
    return CGraph(verts, cluster, label, edges)


def suppress_dummies(g: Digraph) -> Digraph:
    """Replace every dummy with one incoming and one outgoing edge by a single arc."""
    verts = [v for v in g.vertices if not _is_dummy(v) or not _suppressible(g, v)]
    keep = set(verts)
    edges = []
    for v in g.vertices:
        if v in keep:
            continue
        (e_in,) = [e for e in g.incident(v) if g.head(e) == v]
        (e_out,) = [e for e in g.incident(v) if g.tail(e) == v]
        edges.append(((0, v[1]), g.tail(e_in), g.head(e_out)))
    for i, (e, t, h) in enumerate(g.edges):
        if t in keep and h in keep:
            edges.append(((1, i), t, h))
    edges.sort(key=lambda x: x[0])
    return Digraph.build(verts, [(t, h) for _, t, h in edges])


def _is_dummy(v) -> bool:
    return isinstance(v, tuple) and len(v) == 2 and v[0] == "d"


def _suppressible(g: Digraph, v) -> bool:
    inc = g.incident(v)
    return len(inc) == 2 and {g.tail(e) == v for e in inc} == {True, False}


def _decide(c: CGraph, k: int, rigid: str) -> bool:
    try:
        return k_modality(canonical_digraph(c), k, rigid)
    except NonplanarError:
        return False


def nodetrix_planar(c: CGraph, rigid: str = "reduction") -> bool:
    """NodeTrix planarity with fixed sides for two-vertex clusters.

    Rigid components of the canonical digraph are outside the supported
    regime at k = 6; pass ``rigid="exhaustive"`` to search them directly.
    """
    return _decide(c, 6, rigid)


def clique_planar_combs(c: CGraph, r: int, rigid: str = "reduction") -> bool:
    """Clique planarity where every cluster is drawn as an r-comb."""
    if r < 1:
        raise ValueError("r must be positive")
    return _decide(c, 2 * r, rigid)


def parse_cgraph(text) -> CGraph:
    """Lines ``v <id> <cluster> <inn|out>`` and ``e <a> <b>``; ``#`` starts a comment."""
    verts, cluster, label, edges = [], {}, {}, []
    for lineno, parts in _lines(text):
        if parts[0] == "v" and len(parts) == 4:
            v = parse_id(parts[1])
            if v in cluster:
                raise ParseError(lineno, f"duplicate vertex {parts[1]}")
            if parts[3] not in ("inn", "out"):
                raise ParseError(lineno, f"label must be inn or out, got {parts[3]!r}")
            verts.append(v)
            cluster[v] = parse_id(parts[2])
            label[v] = parts[3]
        elif parts[0] == "e" and len(parts) == 3:
            a, b = parse_id(parts[1]), parse_id(parts[2])
            for x, tok in ((a, parts[1]), (b, parts[2])):
                if x not in cluster:
                    raise ParseError(lineno, f"undeclared vertex {tok}")
            edges.append((a, b))
        else:
            raise ParseError(lineno, f"cannot parse {' '.join(parts)!r}")
    try:
        return CGraph(verts, cluster, label, edges)
    except GraphError as exc:
        raise ParseError(0, str(exc)) from None


def serialize_cgraph(c: CGraph) -> str:
    lines = [f"v {v} {c.cluster[v]} {c.label[v]}" for v in c.vertices]
    lines += [f"e {a} {b}" for a, b in c.edges]
    return "\n".join(lines) + "\n"


def gen_cgraph(quotient: Digraph, seed: int = 0, single: float = 0.2) -> CGraph:
    """Random c-graph whose cluster multigraph is ``quotient`` (edge directions ignored).

    Clusters have two vertices except a ``single`` fraction; each inter
    edge picks its endpoint inside each cluster at random.
    """
    rng = random.Random(seed)
    verts, cluster, label, edges = [], {}, {}, []
    members: dict = {}
    for v in quotient.vertices:
        if rng.random() < single:
            x = f"{v}a"
            verts.append(x)
            cluster[x] = v
            label[x] = rng.choice(("inn", "out"))
            members[v] = [x]
        else:
            xs = [f"{v}a", f"{v}b"]
            verts += xs
            for x in xs:
                cluster[x] = v
            label[xs[0]], label[xs[1]] = ("inn", "out") if rng.random() < 0.5 else ("out", "inn")
            members[v] = xs
            edges.append(tuple(xs))
    for _, t, h in quotient.edges:
        edges.append((rng.choice(members[t]), rng.choice(members[h])))
    return CGraph(verts, cluster, label, edges)
