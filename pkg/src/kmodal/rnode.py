"""Rigid skeletons: the skeleton-selection problem and its reduction to NAESAT.

An instance assigns to each skeleton edge a set of embedding tuples;
a *selection* picks one tuple per edge.  The modality it induces at a
skeleton vertex ``x`` comes from the pairs ``(s1, a)`` (``x`` is the
edge's tail) or ``(s2, b)`` (``x`` is the head) glued along the
rotation at ``x``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .digraph import INN, OUT
from .naesat import Formula, nae_solve
from .tuples import EmbeddingTuple, contribution, gist_of


@dataclass
class SkelInstance:
    vertices: list
    ends: dict  # key -> (tail, head)
    rotation: dict  # vertex -> cyclic list of keys
    sets: dict  # key -> list of EmbeddingTuple
    m: dict
    marked: set = field(default_factory=set)

    def keys(self) -> list:
        return list(self.ends)


def pair_at(t: EmbeddingTuple, at_tail: bool) -> tuple:
    return (t.s1, t.a) if at_tail else (t.s2, t.b)


def _pair_contribution(pair: tuple, at_tail: bool) -> tuple:
    s, a = pair
    return (s.flip(a), s, a) if at_tail else (s, s.flip(a), a)


def cyclic_modality(parts: list) -> int:
    """Cyclic modality of consecutive (first, last, alternations) blocks."""
    total = sum(p[2] for p in parts)
    n = len(parts)
    for i in range(n):
        total += parts[i][1] != parts[(i + 1) % n][0]
    return total


def vertex_modality(inst: SkelInstance, x, pairs: Mapping) -> int:
    """Modality at ``x`` given a pair for every key incident to ``x``."""
    return cyclic_modality(
        [_pair_contribution(pairs[key], inst.ends[key][0] == x) for key in inst.rotation[x]]
    )


def selection_ok(inst: SkelInstance, sel: Mapping, vertices=None) -> bool:
    for x in inst.vertices if vertices is None else vertices:
        if x in inst.marked:
            continue
        pairs = {key: pair_at(sel[key], inst.ends[key][0] == x) for key in inst.rotation[x]}
        if vertex_modality(inst, x, pairs) > inst.m[x]:
            return False
    return True


def is_good(inst: SkelInstance) -> bool:
    """Every unmarked vertex has sum over its keys of (max alternations + 1) <= 6."""
    for x in inst.vertices:
        if x in inst.marked:
            continue
        tot = 0
        for key in inst.rotation[x]:
            tail = inst.ends[key][0] == x
            tot += 1 + max(pair_at(t, tail)[1] for t in inst.sets[key])
        if tot > 6:
            return False
    return True


def _bfs_vertices(inst: SkelInstance) -> list:
    order: list = []
    seen: set = set()
    for s in inst.vertices:
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            x = queue.pop(0)
            order.append(x)
            for key in inst.rotation[x]:
                for y in inst.ends[key]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
    return order


def brute_force(inst: SkelInstance):
    """Backtracking reference solver; returns a selection dict or None.

    After every assignment each endpoint must still admit some choice
    for its unassigned keys (checked exhaustively on that vertex).
    """
    keys: list = []
    seen: set = set()
    for x in _bfs_vertices(inst):
        for key in inst.rotation[x]:
            if key not in seen:
                seen.add(key)
                keys.append(key)
    keys += [k for k in inst.keys() if k not in seen]
    sel: dict = {}

    def partial_ok(x) -> bool:
        if x in inst.marked:
            return True
        ring = inst.rotation[x]
        free = [key for key in ring if key not in sel]
        for combo in itertools.product(*(inst.sets[key] for key in free)):
            trial = dict(zip(free, combo))
            pairs = {
                key: pair_at(sel[key] if key in sel else trial[key], inst.ends[key][0] == x) for key in ring
            }
            if vertex_modality(inst, x, pairs) <= inst.m[x]:
                return True
        return False

    def rec(i):
        if i == len(keys):
            return True
        key = keys[i]
        for t in inst.sets[key]:
            sel[key] = t
            if all(partial_ok(x) for x in inst.ends[key]) and rec(i + 1):
                return True
        del sel[key]
        return False

    return dict(sel) if rec(0) else None


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------


class _Var:
    """A (possibly merged) edge variable.

    ``incs`` lists its active incidences ``(key, vertex)``; ``dom`` maps the
    tuple of pairs at those incidences to a witness ``{key: tuple}``.
    """

    __slots__ = ("incs", "dom")

    def __init__(self, incs, dom):
        self.incs = incs
        self.dom = dom

    def proj(self, dkey, x) -> tuple:
        return tuple(p for (k, y), p in zip(self.incs, dkey) if y == x)

    def drop_vertex(self, x) -> None:
        keep = [i for i, (_, y) in enumerate(self.incs) if y != x]
        new: dict = {}
        for dk, w in self.dom.items():
            nk = tuple(dk[i] for i in keep)
            new.setdefault(nk, w)
        self.incs = [self.incs[i] for i in keep]
        self.dom = new


@dataclass
class Reduced:
    inst: SkelInstance
    vars: list
    var_of: dict  # key -> index into vars
    marked: set


class Rejected(Exception):
    pass


def _vars_at(red: Reduced, x) -> list:
    seen: list = []
    for key in red.inst.rotation[x]:
        vi = red.var_of[key]
        if vi not in seen:
            seen.append(vi)
    return seen


def _combos_at(red: Reduced, x, vis: list):
    """Satisfying choices of per-variable projections at ``x``."""
    inst = red.inst
    projs = [sorted({red.vars[vi].proj(dk, x) for dk in red.vars[vi].dom}) for vi in vis]
    sat, total = [], 0
    for combo in itertools.product(*projs):
        total += 1
        pairs = {}
        for vi, pr in zip(vis, combo):
            for (key, y), p in zip([inc for inc in red.vars[vi].incs if inc[1] == x], pr):
                pairs[key] = p
        if vertex_modality(inst, x, pairs) <= inst.m[x]:
            sat.append(combo)
    return projs, sat, total


def _mark(red: Reduced, x) -> None:
    red.marked.add(x)
    for vi in _vars_at(red, x):
        red.vars[vi].drop_vertex(x)


def _active_vertices(var: _Var) -> set:
    return {y for _, y in var.incs}


def reduce(inst: SkelInstance) -> Reduced:
    """Apply the reduction rules to a fixed point; raises Rejected."""
    vars_: list = []
    var_of: dict = {}
    for key in inst.keys():
        incs = [(key, x) for x in inst.ends[key] if x not in inst.marked]
        dom: dict = {}
        for t in inst.sets[key]:
            dk = tuple(pair_at(t, x == inst.ends[key][0]) for _, x in incs)
            dom.setdefault(dk, {key: t})
        if not dom:
            raise Rejected(f"empty tuple set on {key!r}")
        var_of[key] = len(vars_)
        vars_.append(_Var(incs, dom))
    red = Reduced(inst, vars_, var_of, set(inst.marked))
    queue = [x for x in inst.vertices if x not in red.marked]
    queued = set(queue)
    while queue:
        x = queue.pop()
        queued.discard(x)
        if x in red.marked:
            continue
        vis = _vars_at(red, x)
        projs, sat, total = _combos_at(red, x, vis)
        if not sat:
            raise Rejected(f"no local choice satisfies vertex {x!r}")
        touched = set()
        # arc consistency
        for j, vi in enumerate(vis):
            ok = {c[j] for c in sat}
            if len(ok) < len(projs[j]):
                var = red.vars[vi]
                var.dom = {dk: w for dk, w in var.dom.items() if var.proj(dk, x) in ok}
                touched |= _active_vertices(var)
        if len(sat) == total:
            touched |= {y for vi in vis for y in _active_vertices(red.vars[vi])}
            _mark(red, x)
        else:
            varied = [j for j, vi in enumerate(vis) if len({c[j] for c in sat}) > 1]
            if len(varied) <= 2:
                if len(varied) == 2:
                    _merge(red, x, vis, varied, sat)
                touched |= {y for vi in _vars_at(red, x) for y in _active_vertices(red.vars[vi])}
                _mark(red, x)
        touched.discard(x)
        for y in touched:
            if y not in red.marked and y not in queued:
                queue.append(y)
                queued.add(y)
    return red


def _merge(red: Reduced, x, vis: list, varied: list, sat: list) -> None:
    i, j = varied
    X, Y = red.vars[vis[i]], red.vars[vis[j]]
    allowed = {(c[i], c[j]) for c in sat}
    incs = [inc for inc in X.incs if inc[1] != x] + [inc for inc in Y.incs if inc[1] != x]
    dom: dict = {}
    for dx, wx in X.dom.items():
        px = X.proj(dx, x)
        restx = tuple(p for (_, y), p in zip(X.incs, dx) if y != x)
        for dy, wy in Y.dom.items():
            if (px, Y.proj(dy, x)) not in allowed:
                continue
            resty = tuple(p for (_, y), p in zip(Y.incs, dy) if y != x)
            dom.setdefault(restx + resty, {**wx, **wy})
    merged = _Var(incs, dom)
    new_index = len(red.vars)
    red.vars.append(merged)
    for key, vi in list(red.var_of.items()):
        if vi in (vis[i], vis[j]):
            red.var_of[key] = new_index
    # merged variables keep only incidences away from x; x is marked by the caller
    X.incs, X.dom, Y.incs, Y.dom = [], {}, [], {}


def irreducible_profile_ok(red: Reduced) -> bool:
    """Unmarked vertices have degree 3, bound 4 and pairs {(in,1),(out,1)}."""
    want = {((INN, 1),), ((OUT, 1),)}
    for x in red.inst.vertices:
        if x in red.marked:
            continue
        vis = _vars_at(red, x)
        if len(red.inst.rotation[x]) != 3 or len(vis) != 3 or red.inst.m[x] != 4:
            return False
        for vi in vis:
            var = red.vars[vi]
            if {var.proj(dk, x) for dk in var.dom} != want:
                return False
    return True


def to_formula(red: Reduced):
    """NAESAT formula of an irreducible instance plus the variable map."""
    bvar: dict = {}
    for x in red.inst.vertices:
        if x in red.marked:
            continue
        for key in red.inst.rotation[x]:
            bvar[(key, x)] = len(bvar) + 1
    clauses = []
    for x in red.inst.vertices:
        if x in red.marked:
            continue
        lits = []
        for key in red.inst.rotation[x]:
            tail = red.inst.ends[key][0] == x
            lits.append(-bvar[(key, x)] if tail else bvar[(key, x)])
        clauses.append(tuple(lits))
    for vi in sorted(set(red.var_of.values())):
        var = red.vars[vi]
        if len(var.incs) != 2:
            continue
        x1, x2 = bvar[var.incs[0]], bvar[var.incs[1]]
        same = {((INN, 1), (INN, 1)), ((OUT, 1), (OUT, 1))}
        if same <= set(var.dom):
            clauses.append((x1, -x2))
        else:
            clauses.append((x1, x2))
    return Formula(len(bvar), tuple(clauses)), bvar


def solve_good_instance(inst: SkelInstance):
    """Selection satisfying every unmarked vertex, or None."""
    try:
        red = reduce(inst)
    except Rejected:
        return None
    if not irreducible_profile_ok(red):
        raise AssertionError("reduction stopped outside the irreducible profile")
    f, bvar = to_formula(red)
    assign = nae_solve(f)
    if assign is None:
        return None
    sel: dict = {}
    for vi in sorted(set(red.var_of.values())):
        var = red.vars[vi]
        want = tuple((INN if assign[bvar[inc]] else OUT, 1) for inc in var.incs)
        w = var.dom.get(want)
        if w is None:
            raise AssertionError("formula assignment outside a variable's relation")
        sel.update(w)
    if not selection_ok(inst, sel):
        raise AssertionError("reconstructed selection violates a vertex bound")
    return sel


def instance_to_text(inst: SkelInstance) -> str:
    lines = []
    for x in inst.vertices:
        flag = " *" if x in inst.marked else ""
        lines.append(f"vertex {x!r} m={inst.m[x]}{flag} rot={inst.rotation[x]!r}")
    for key, (t, h) in inst.ends.items():
        lines.append(f"edge {key!r} {t!r}->{h!r} {list(inst.sets[key])!r}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# R-node tuples
# ---------------------------------------------------------------------------


def _pole_tuple(nd, rot: dict, sel: Mapping):
    u, v = nd.poles
    out = []
    for x in (u, v):
        keys = rot[x]
        i = keys.index(nd.parent_key)
        seq = keys[i + 1:] + keys[:i]
        out.append([contribution(sel[k], nd.ends[k][0] == x) for k in seq])
    pu, pv = out
    a = sum(p[2] for p in pu) + sum(pu[i][1] != pu[i + 1][0] for i in range(len(pu) - 1))
    b = sum(p[2] for p in pv) + sum(pv[i][1] != pv[i + 1][0] for i in range(len(pv) - 1))
    return EmbeddingTuple(pu[-1][1], a, pv[0][0], b)


def _rotations(nd) -> list:
    base = {x: list(ks) for x, ks in nd.rotation.items()}
    return [(False, base), (True, {x: ks[::-1] for x, ks in base.items()})]


def r_tuples(nd, child_gists: Mapping, m: Mapping):
    """Gist of a rigid node via candidate enumeration and the skeleton solver."""
    u, v = nd.poles
    pk = nd.parent_key
    pole_keys = [k for k in nd.keys if u in nd.ends[k] or v in nd.ends[k]]
    found: dict = {}
    for reflect, rot in _rotations(nd):
        inner_rot = {x: [k for k in ks if k != pk] for x, ks in rot.items()}
        cache: dict = {}
        for combo in itertools.product(*(child_gists[k] for k in pole_keys)):
            sel = dict(zip(pole_keys, combo))
            cand = _pole_tuple(nd, rot, sel)
            if cand.a > m[u] or cand.b > m[v] or cand in found:
                continue
            far = tuple(
                pair_at(sel[k], nd.ends[k][0] != (u if u in nd.ends[k] else v)) for k in pole_keys
            )
            if far not in cache:
                sets = {k: list(child_gists[k]) for k in nd.keys}
                sets.update({k: [t] for k, t in sel.items()})
                inst = SkelInstance(
                    vertices=list(rot),
                    ends={k: nd.ends[k] for k in nd.keys},
                    rotation=inner_rot,
                    sets=sets,
                    m={x: m[x] for x in rot},
                    marked={u, v},
                )
                if not is_good(inst):
                    raise AssertionError("rigid skeleton instance is not good")
                cache[far] = solve_good_instance(inst)
            got = cache[far]
            if got is not None:
                full = dict(got)
                full.update(sel)
                found[cand] = (reflect, full)
    gist = gist_of(found)
    return gist, {t: found[t] for t in gist}


def r_tuples_brute(nd, child_gists: Mapping, m: Mapping):
    """Reference gist of a rigid node by exhaustive selection enumeration."""
    u, v = nd.poles
    found: dict = {}
    for reflect, rot in _rotations(nd):
        inner_rot = {x: [k for k in ks if k != nd.parent_key] for x, ks in rot.items()}
        inst = SkelInstance(list(rot), {k: nd.ends[k] for k in nd.keys}, inner_rot,
                            {k: list(child_gists[k]) for k in nd.keys}, dict(m), {u, v})
        inner = [x for x in rot if x not in (u, v)]
        for combo in itertools.product(*(child_gists[k] for k in nd.keys)):
            sel = dict(zip(nd.keys, combo))
            cand = _pole_tuple(nd, rot, sel)
            if cand.a > m[u] or cand.b > m[v] or cand in found:
                continue
            if selection_ok(inst, sel, inner):
                found[cand] = (reflect, sel)
    gist = gist_of(found)
    return gist, {t: found[t] for t in gist}
