"""Directed multigraphs, rotation systems and modality evaluation.

Rotation lists are read as counter-clockwise cyclic orders of edge ids.
Since self-loops are rejected, an edge id identifies its incidence at a vertex.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

import networkx as nx

Vertex = Hashable


class GraphError(ValueError):
    """Structurally invalid graph or embedding."""


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class Orientation(str, Enum):
    INN = "inn"
    OUT = "out"

    def flip(self, times: int = 1) -> "Orientation":
        if times % 2 == 0:
            return self
        return Orientation.OUT if self is Orientation.INN else Orientation.INN

    def __repr__(self) -> str:
        return self.value


INN = Orientation.INN
OUT = Orientation.OUT


def sort_key(x):
    """Total order over mixed int/str vertex ids."""
    if isinstance(x, int):
        return (0, x, "")
    return (1, 0, str(x))


@dataclass(frozen=True, eq=False)
class Digraph:
    vertices: tuple
    edges: tuple  # of (eid, tail, head)
    _ends: dict = field(repr=False, compare=False)
    _inc: dict = field(repr=False, compare=False)

    @classmethod
    def build(cls, vertices: Iterable[Vertex], edges: Iterable[tuple]) -> "Digraph":
        """Make a digraph from vertex ids and ``(eid, tail, head)`` triples.

        Pairs ``(tail, head)`` are accepted too and numbered in order.
        """
        verts = tuple(vertices)
        if len(set(verts)) != len(verts):
            raise GraphError("duplicate vertex id")
        vset = set(verts)
        ends: dict = {}
        inc: dict = {v: [] for v in verts}
        norm = []
        for i, item in enumerate(edges):
            if len(item) == 2:
                eid, t, h = i, item[0], item[1]
            else:
                eid, t, h = item
            if eid in ends:
                raise GraphError(f"duplicate edge id {eid!r}")
            if t not in vset or h not in vset:
                raise GraphError(f"edge {eid!r} has an undeclared endpoint")
            if t == h:
                raise GraphError(f"self-loop at {t!r}")
            ends[eid] = (t, h)
            inc[t].append(eid)
            inc[h].append(eid)
            norm.append((eid, t, h))
        return cls(verts, tuple(norm), ends, {v: tuple(es) for v, es in inc.items()})

    # -- basic queries -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_ids(self) -> list:
        return [e for e, _, _ in self.edges]

    def ends(self, e) -> tuple:
        return self._ends[e]

    def tail(self, e) -> Vertex:
        return self._ends[e][0]

    def head(self, e) -> Vertex:
        return self._ends[e][1]

    def other(self, e, x) -> Vertex:
        t, h = self._ends[e]
        return h if x == t else t

    def orientation(self, e, x) -> Orientation:
        t, h = self._ends[e]
        if x == t:
            return OUT
        if x == h:
            return INN
        raise GraphError(f"{x!r} is not an endpoint of edge {e!r}")

    def incident(self, v) -> tuple:
        return self._inc[v]

    def degree(self, v) -> int:
        return len(self._inc[v])

    def max_degree(self) -> int:
        return max((len(es) for es in self._inc.values()), default=0)

    def __contains__(self, v) -> bool:
        return v in self._inc

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    # -- derived graphs ------------------------------------------------
    def subgraph(self, edge_ids: Iterable, vertices: Iterable | None = None) -> "Digraph":
        keep = set(edge_ids)
        es = [t for t in self.edges if t[0] in keep]
        if vertices is None:
            used = {x for _, t, h in es for x in (t, h)}
            verts = [v for v in self.vertices if v in used]
        else:
            vs = set(vertices)
            verts = [v for v in self.vertices if v in vs]
        return Digraph.build(verts, es)

    def relabel(self, vmap: Mapping, emap: Mapping | None = None) -> "Digraph":
        emap = emap or {}
        return Digraph.build(
            [vmap[v] for v in self.vertices],
            [(emap.get(e, e), vmap[t], vmap[h]) for e, t, h in self.edges],
        )

    def components(self) -> list[list]:
        """Vertex sets of connected components, in declaration order."""
        seen: set = set()
        comps = []
        for s in self.vertices:
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                x = stack.pop()
                comp.append(x)
                for e in self._inc[x]:
                    y = self.other(e, x)
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            order = {v: i for i, v in enumerate(self.vertices)}
            comps.append(sorted(comp, key=order.__getitem__))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def underlying(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((t, h) for _, t, h in self.edges)
        return g

    def is_planar(self) -> bool:
        return nx.check_planarity(self.underlying())[0]


# ---------------------------------------------------------------------------
# Rotation systems
# ---------------------------------------------------------------------------


class RotationSystem:
    """Cyclic (counter-clockwise) order of incident edges at every vertex."""

    def __init__(self, graph: Digraph, rotation: Mapping):
        self.graph = graph
        rot = {}
        for v in graph.vertices:
            seq = tuple(rotation.get(v, ()))
            if sorted(seq, key=sort_key) != sorted(graph.incident(v), key=sort_key):
                raise GraphError(f"rotation at {v!r} does not list its incident edges exactly once")
            rot[v] = seq
        self.rotation = rot
        self._pos = {v: {e: i for i, e in enumerate(seq)} for v, seq in rot.items()}

    def __getitem__(self, v) -> tuple:
        return self.rotation[v]

    def __eq__(self, other) -> bool:
        return isinstance(other, RotationSystem) and self.rotation == other.rotation

    def __repr__(self) -> str:
        return f"RotationSystem({self.rotation!r})"

    def successor(self, v, e):
        seq = self.rotation[v]
        return seq[(self._pos[v][e] + 1) % len(seq)]

    def orientations(self, v) -> list[Orientation]:
        return [self.graph.orientation(e, v) for e in self.rotation[v]]

    def reflected(self) -> "RotationSystem":
        return RotationSystem(self.graph, {v: tuple(reversed(s)) for v, s in self.rotation.items()})

    def is_planar(self) -> bool:
        return is_planar_rotation(self)


def count_alternations(orients: Sequence[Orientation], cyclic: bool = True) -> int:
    n = len(orients)
    if n <= 1:
        return 0
    c = sum(1 for i in range(n - 1) if orients[i] != orients[i + 1])
    if cyclic and orients[-1] != orients[0]:
        c += 1
    return c


def modality_at(rs: RotationSystem, v) -> int:
    return count_alternations(rs.orientations(v))


def modalities(rs: RotationSystem) -> dict:
    return {v: modality_at(rs, v) for v in rs.graph.vertices}


def max_modality_of(rs: RotationSystem) -> int:
    return max(modalities(rs).values(), default=0)


def is_k_modal(rs: RotationSystem, k: int) -> bool:
    return all(modality_at(rs, v) <= k for v in rs.graph.vertices)


def satisfies_m(rs: RotationSystem, m: Mapping) -> bool:
    return all(modality_at(rs, v) <= m[v] for v in rs.graph.vertices)


def trace_faces(rs: RotationSystem) -> list[list[tuple]]:
    """Face boundary walks as lists of darts ``(edge, from_vertex)``.

    The dart following ``(e, x)`` leaves ``y = other(e, x)`` along the
    successor of ``e`` in the rotation at ``y``.
    """
    g = rs.graph
    seen: set = set()
    faces = []
    for e, t, h in g.edges:
        for start in ((e, t), (e, h)):
            if start in seen:
                continue
            walk = []
            d = start
            while d not in seen:
                seen.add(d)
                walk.append(d)
                de, dx = d
                y = g.other(de, dx)
                d = (rs.successor(y, de), y)
            faces.append(walk)
    return faces


def euler_defects(rs: RotationSystem) -> dict:
    """Per component (keyed by its first vertex): ``V - E + F - 2``."""
    g = rs.graph
    faces = trace_faces(rs)
    comp_of = {}
    comps = g.components()
    for c in comps:
        for v in c:
            comp_of[v] = c[0]
    nf: dict = {c[0]: 0 for c in comps}
    for f in faces:
        nf[comp_of[f[0][1]]] += 1
    out = {}
    for c in comps:
        cs = set(c)
        ne = sum(1 for _, t, _h in g.edges if t in cs)
        f = nf[c[0]] if ne else 1
        out[c[0]] = len(c) - ne + f - 2
    return out


def is_planar_rotation(rs: RotationSystem) -> bool:
    return all(d == 0 for d in euler_defects(rs).values())


# ---------------------------------------------------------------------------
# Bimodality
# ---------------------------------------------------------------------------


def bimodal_test(g: Digraph) -> bool:
    """True iff ``g`` has a 2-modal planar embedding.

    Every vertex with both incoming and outgoing edges is split into an
    in-half and an out-half joined by an edge; the result must be planar.
    """
    h = nx.Graph()
    where = {}
    for v in g.vertices:
        ins = any(g.orientation(e, v) is INN for e in g.incident(v))
        outs = any(g.orientation(e, v) is OUT for e in g.incident(v))
        if ins and outs:
            h.add_edge(("in", v), ("out", v))
            where[v] = {INN: ("in", v), OUT: ("out", v)}
        else:
            h.add_node(("all", v))
            where[v] = {INN: ("all", v), OUT: ("all", v)}
    for e, t, hd in g.edges:
        h.add_edge(where[t][OUT], where[hd][INN])
    return nx.check_planarity(h)[0]


# ---------------------------------------------------------------------------
# Text / JSON / DOT formats
# ---------------------------------------------------------------------------

_INT = re.compile(r"-?\d+\Z")


def parse_id(tok: str):
    return int(tok) if _INT.match(tok) else tok


def _lines(text) -> Iterator[tuple[int, list[str]]]:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_digraph(text) -> Digraph:
    """Parse the ``v <id>`` / ``e <tail> <head>`` edge-list format."""
    verts: list = []
    vset: set = set()
    edges: list = []
    for lineno, toks in _lines(text):
        kind = toks[0]
        if kind == "v":
            if len(toks) != 2:
                raise ParseError(lineno, "expected 'v <id>'")
            v = parse_id(toks[1])
            if v in vset:
                raise ParseError(lineno, f"duplicate vertex {v!r}")
            vset.add(v)
            verts.append(v)
        elif kind == "e":
            if len(toks) != 3:
                raise ParseError(lineno, "expected 'e <tail> <head>'")
            t, h = parse_id(toks[1]), parse_id(toks[2])
            if t == h:
                raise ParseError(lineno, f"self-loop at {t!r}")
            for x in (t, h):
                if x not in vset:
                    raise ParseError(lineno, f"undeclared vertex {x!r}")
            edges.append((len(edges), t, h))
        else:
            raise ParseError(lineno, f"unknown record {kind!r}")
    return Digraph.build(verts, edges)


def serialize_digraph(g: Digraph) -> str:
    out = [f"v {v}" for v in g.vertices]
    out += [f"e {t} {h}" for _, t, h in g.edges]
    return "\n".join(out) + "\n"


def parse_mfile(text, g: Digraph, default: int) -> dict:
    """Per-vertex bounds, lines ``<vertex> <even int>``; others get ``default``."""
    m = {v: default for v in g.vertices}
    for lineno, toks in _lines(text):
        if len(toks) != 2:
            raise ParseError(lineno, "expected '<vertex> <bound>'")
        v = parse_id(toks[0])
        if v not in m:
            raise ParseError(lineno, f"unknown vertex {v!r}")
        try:
            m[v] = int(toks[1])
        except ValueError:
            raise ParseError(lineno, f"bad bound {toks[1]!r}") from None
    return m


def rotation_to_json(rs: RotationSystem) -> str:
    g = rs.graph
    doc = {
        "vertices": list(g.vertices),
        "edges": [[e, t, h] for e, t, h in g.edges],
        "rotation": [[v, list(rs[v])] for v in g.vertices],
    }
    return json.dumps(doc, indent=1)


def rotation_from_json(text) -> RotationSystem:
    doc = json.loads(text)
    g = Digraph.build(doc["vertices"], [tuple(x) for x in doc["edges"]])
    return RotationSystem(g, {v: tuple(es) for v, es in doc["rotation"]})


def _dot_id(x) -> str:
    return '"' + str(x).replace('"', '\\"') + '"'


def digraph_to_dot(g: Digraph, rs: RotationSystem | None = None, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in g.vertices:
        if rs is not None:
            lines.append(f"  // rotation at {v}: {' '.join(map(str, rs[v]))}")
        lines.append(f"  {_dot_id(v)};")
    for e, t, h in g.edges:
        lines.append(f"  {_dot_id(t)} -> {_dot_id(h)} [label={_dot_id(e)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
