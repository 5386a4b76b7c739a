"""Two-occurrence not-all-equal satisfiability.

Literals follow the DIMACS convention: variable ``i`` is ``i``, its
negation ``-i``.  A clause is satisfied when its literals do not all take
the same value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import networkx as nx


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Formula:
    nvars: int
    clauses: tuple  # of tuples of nonzero ints

    def __post_init__(self):
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.nvars:
                    raise FormulaError(f"literal {lit} out of range 1..{self.nvars}")

    def occurrences(self) -> dict:
        occ: dict = {}
        for i, c in enumerate(self.clauses):
            for lit in set(c):
                occ.setdefault(abs(lit), set()).add(i)
        return occ

    def is_two_occurrence(self) -> bool:
        return all(len(s) <= 2 for s in self.occurrences().values())


def lit_value(lit: int, assign) -> bool:
    val = assign[abs(lit)]
    return val if lit > 0 else not val


def clause_nae(clause, assign) -> bool:
    vals = {lit_value(lit, assign) for lit in clause}
    return len(vals) == 2


def evaluate(f: Formula, assign) -> bool:
    return all(clause_nae(c, assign) for c in f.clauses)


def normalize(f: Formula):
    """Collapse repeated literals and drop clauses holding x and -x.

    Returns the list of literal sets, or None if some clause can never
    be satisfied (fewer than two distinct literals).
    """
    out = []
    for c in f.clauses:
        lits = set(c)
        if any(-lit in lits for lit in lits):
            continue
        if len(lits) < 2:
            return None
        out.append(lits)
    return out


def nae_solve(f: Formula) -> dict | None:
    """Satisfying assignment ``{var: bool}`` of a two-occurrence formula, or None."""
    if not f.is_two_occurrence():
        raise FormulaError("some variable occurs in more than two clauses")
    clauses = normalize(f)
    if clauses is None:
        return None
    occ: dict = {}
    for i, c in enumerate(clauses):
        for lit in c:
            occ.setdefault(abs(lit), set()).add(i)
    alive = set(range(len(clauses)))
    cur = [set(c) for c in clauses]
    stack: list = []

    def peel(pending):
        while pending:
            x = pending.pop()
            if len(occ[x]) != 1:
                continue
            (c,) = occ[x]
            alive.discard(c)
            stack.append((c, x))
            for lit in cur[c]:
                y = abs(lit)
                occ[y].discard(c)
                if y != x and len(occ[y]) == 1:
                    pending.append(y)

    peel([x for x, s in occ.items() if len(s) == 1])
    # Dropping a literal from a clause of three or more only strengthens
    # it.  On a non-bridge variable the component stays connected and
    # gains a single occurrence, so the whole component then peels.
    for comp in _components(alive, cur, occ):
        if all(len(cur[c]) == 2 for c in comp):
            continue
        c, x = _non_bridge_literal(comp, cur, occ)
        cur[c] = {lit for lit in cur[c] if abs(lit) != x}
        occ[x].discard(c)
        peel([x])
    assign: dict = {}
    # what is left is a union of cycles of two-literal clauses
    seen_clauses: set = set()
    for c0 in sorted(alive):
        if c0 in seen_clauses:
            continue
        lits = sorted(cur[c0], key=abs)
        start = abs(lits[0])
        assign[start] = False
        work = [start]
        while work:
            x = work.pop()
            for c in occ[x]:
                seen_clauses.add(c)
                l1, l2 = cur[c]
                mine, other = (l1, l2) if abs(l1) == x else (l2, l1)
                want = not lit_value(mine, assign)
                y = abs(other)
                val = want if other > 0 else not want
                if y in assign:
                    if assign[y] != val:
                        return None
                else:
                    assign[y] = val
                    work.append(y)
    for c, x in reversed(stack):
        for lit in cur[c]:
            assign.setdefault(abs(lit), False)
        others = {lit_value(lit, assign) for lit in cur[c] if abs(lit) != x}
        lit_x = next(lit for lit in cur[c] if abs(lit) == x)
        if len(others) == 1:
            target = not next(iter(others))
            assign[x] = target if lit_x > 0 else not target
    for v in range(1, f.nvars + 1):
        assign.setdefault(v, False)
    if not evaluate(f, assign):
        raise AssertionError("nae_solve produced a non-satisfying assignment")
    return assign


def _var_graph(comp, cur, occ) -> nx.MultiGraph:
    g = nx.MultiGraph()
    g.add_nodes_from(comp)
    for c in comp:
        for lit in cur[c]:
            a, b = occ[abs(lit)]
            if a == c:
                g.add_edge(a, b, key=abs(lit))
    return g


def _components(alive, cur, occ) -> list:
    return [sorted(cc) for cc in nx.connected_components(_var_graph(alive, cur, occ))]


def _non_bridge_literal(comp, cur, occ) -> tuple:
    """(clause, var) with the clause holding three or more literals and var on a cycle."""
    g = _var_graph(comp, cur, occ)
    bridges = {frozenset(e) for e in nx.bridges(g)}
    for c in comp:
        if len(cur[c]) < 3:
            continue
        for lit in sorted(cur[c], key=lambda z: (abs(z), z)):
            a, b = occ[abs(lit)]
            if frozenset((a, b)) not in bridges or g.number_of_edges(a, b) > 1:
                return c, abs(lit)
    raise AssertionError("component without a cycle through a long clause")


def _var_masks(n: int) -> list:
    """Bitsets over all 2**n assignments; variable 1 is the most significant bit."""
    size = 1 << n
    masks = [0]
    for i in range(1, n + 1):
        half = 1 << (n - i)
        m, width = ((1 << half) - 1) << half, 2 * half
        while width < size:
            m |= m << width
            width *= 2
        masks.append(m)
    return masks


def nae_brute(f: Formula, max_vars: int = 22) -> dict | None:
    """Lexicographically least satisfying assignment (False < True), or None.

    Evaluates every assignment at once on bitsets indexed by assignment.
    """
    if f.nvars > max_vars:
        raise FormulaError(f"brute force limited to {max_vars} variables")
    n = f.nvars
    full = (1 << (1 << n)) - 1
    masks = _var_masks(n)
    sat = full
    for c in f.clauses:
        any_true, all_true = 0, full
        for lit in c:
            m = masks[lit] if lit > 0 else full ^ masks[-lit]
            any_true |= m
            all_true &= m
        sat &= any_true & ~all_true
        if not sat:
            return None
    idx = (sat & -sat).bit_length() - 1
    return {i: bool(idx >> (n - i) & 1) for i in range(1, n + 1)}


def always_sat_check(f: Formula) -> bool:
    """True when the formula is satisfiable for structural reasons alone.

    That is the case when every clause has two distinct variables and no
    connected component of the variable-clause incidence graph is a
    simple cycle; then every sign pattern is satisfiable.
    """
    if not f.is_two_occurrence():
        raise FormulaError("some variable occurs in more than two clauses")
    clauses = normalize(f)
    if clauses is None:
        return False
    if not clauses:
        return True
    parent = list(range(len(clauses)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    occ: dict = {}
    for i, c in enumerate(clauses):
        for lit in c:
            occ.setdefault(abs(lit), []).append(i)
    for cs in occ.values():
        if len(cs) == 2:
            parent[find(cs[0])] = find(cs[1])
    comp_ok: dict = {}
    for i, c in enumerate(clauses):
        r = find(i)
        cyc = len(c) == 2 and all(len(occ[abs(lit)]) == 2 for lit in c)
        comp_ok[r] = comp_ok.get(r, True) and cyc
    return not any(comp_ok.values())


def parse_dimacs_nae(text: str) -> Formula:
    """Parse ``p nae <vars> <clauses>`` followed by zero-terminated clauses."""
    nvars = nclauses = None
    clauses: list = []
    buf: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] not in ("nae", "cnf"):
                raise FormulaError(f"line {lineno}: bad header {line!r}")
            nvars, nclauses = int(parts[2]), int(parts[3])
            continue
        if nvars is None:
            raise FormulaError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormulaError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(buf))
                buf = []
            else:
                buf.append(lit)
    if buf:
        clauses.append(tuple(buf))
    if nvars is None:
        raise FormulaError("missing header")
    if nclauses is not None and len(clauses) != nclauses:
        raise FormulaError(f"header announces {nclauses} clauses, found {len(clauses)}")
    return Formula(nvars, tuple(clauses))


def format_dimacs_nae(f: Formula) -> str:
    lines = [f"p nae {f.nvars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"
