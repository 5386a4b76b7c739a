"""Command-line interface.

Exit codes: 0 yes, 1 no, 2 unsupported instance, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .digraph import (
    GraphError,
    ParseError,
    digraph_to_dot,
    is_planar_rotation,
    modalities,
    parse_digraph,
    parse_mfile,
    rotation_from_json,
    rotation_to_json,
    serialize_digraph,
)
from .decompose import NonplanarError
from .tuples import UnsupportedInstance, find_embedding

YES, NO, UNSUPPORTED, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(INPUT_ERROR)


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load(args):
    g = parse_digraph(_read(args.file))
    m = None
    if getattr(args, "m", None):
        m = parse_mfile(_read(args.m), g, args.k)
    return g, m


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_test(args) -> int:
    g, m = _load(args)
    rs = find_embedding(g, m, args.k, args.rigid)
    print("yes" if rs is not None else "no")
    return YES if rs is not None else NO


def cmd_embed(args) -> int:
    g, m = _load(args)
    rs = find_embedding(g, m, args.k, args.rigid)
    if rs is None:
        print("no")
        return NO
    if args.format == "json":
        _emit(rotation_to_json(rs), args.output)
    elif args.format == "dot":
        _emit(digraph_to_dot(g, rs), args.output)
    else:
        mods = modalities(rs)
        lines = [f"{v}: {' '.join(map(str, rs[v]))}  (modality {mods[v]})" for v in g.vertices]
        _emit("\n".join(lines), args.output)
    return YES


def cmd_verify(args) -> int:
    try:
        rs = rotation_from_json(_read(args.file))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"bad embedding file: {exc}") from None
    g = rs.graph
    m = parse_mfile(_read(args.m), g, args.k) if args.m else {v: args.k for v in g.vertices}
    problems = []
    if not is_planar_rotation(rs):
        problems.append("rotation system is not planar")
    mods = modalities(rs)
    for v in g.vertices:
        if mods[v] > m[v]:
            problems.append(f"vertex {v}: modality {mods[v]} exceeds {m[v]}")
    for p in problems:
        print(p)
    print("yes" if not problems else "no")
    return YES if not problems else NO


def cmd_oracle(args) -> int:
    from .oracle import BudgetExceeded, min_modality

    g = parse_digraph(_read(args.file))
    try:
        k = min_modality(g, budget=args.budget)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}")
        return UNSUPPORTED
    if k is None:
        print("nonplanar")
        return NO
    print(k)
    return YES


def cmd_gen(args) -> int:
    from . import oracle

    if args.cls == "sp":
        g = oracle.gen_series_parallel(args.n, args.seed, args.max_degree)
    elif args.cls == "outerplanar":
        g = oracle.gen_outerplanar(args.n, args.seed)
    elif args.cls == "planar":
        g = oracle.gen_planar_bounded_degree(args.n, args.max_degree or 6, args.seed)
    elif args.cls == "cgraph":
        from .hybrid import gen_cgraph, serialize_cgraph

        q = oracle.gen_series_parallel(args.n, args.seed, args.max_degree)
        _emit(serialize_cgraph(gen_cgraph(q, args.seed)), args.output)
        return YES
    else:
        from .naesat import format_dimacs_nae

        f = oracle.gen_two_occurrence_formula(args.n, max(1, args.n // 2), args.seed)
        _emit(format_dimacs_nae(f), args.output)
        return YES
    _emit(serialize_digraph(g), args.output)
    return YES


def cmd_hybrid(args) -> int:
    from .hybrid import clique_planar_combs, nodetrix_planar, parse_cgraph

    c = parse_cgraph(_read(args.file))
    if args.command == "nodetrix":
        ok = nodetrix_planar(c, args.rigid)
    else:
        ok = clique_planar_combs(c, args.combs, args.rigid)
    print("yes" if ok else "no")
    return YES if ok else NO


def cmd_naesat(args) -> int:
    from .naesat import FormulaError, nae_brute, nae_solve, parse_dimacs_nae

    try:
        f = parse_dimacs_nae(_read(args.file))
        assign = nae_brute(f) if args.brute else nae_solve(f)
    except FormulaError as exc:
        raise InputError(str(exc)) from None
    if assign is None:
        print("unsat")
        return NO
    print("sat")
    print(" ".join(str(v if assign[v] else -v) for v in range(1, f.nvars + 1)) + " 0")
    return YES


def cmd_report(args) -> int:
    from .report import write_report

    rows = write_report(args.out, sizes=args.sizes, k=args.k, seed=args.seed, max_degree=args.max_degree)
    for r in rows:
        ratio = "" if r.ratio is None else f"  x{r.ratio:.2f}"
        print(f"n={r.n:>7}  {r.seconds:8.3f}s  {'yes' if r.accepted else 'no'}{ratio}")
    print(f"wrote {Path(args.out) / 'scaling.csv'} and {Path(args.out) / 'scaling.png'}")
    return YES


def _even(text: str) -> int:
    k = int(text)
    if k < 2 or k % 2:
        raise argparse.ArgumentTypeError("k must be a positive even integer")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kmodal", description="k-modal embeddings of planar digraphs")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def rigid_arg(sp):
        sp.add_argument("--rigid", choices=("reduction", "exhaustive"), default="reduction",
                        help="how rigid components are solved")

    def graph_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="digraph file ('-' for stdin)")
        sp.add_argument("--k", type=_even, required=True)
        sp.add_argument("--m", help="per-vertex bounds file")
        rigid_arg(sp)
        return sp

    graph_cmd("test", "decide k-modality").set_defaults(func=cmd_test)
    sp = graph_cmd("embed", "decide and print a witness embedding")
    sp.add_argument("--format", choices=("json", "dot", "text"), default="json")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("verify", help="check an embedding produced by 'embed'")
    sp.add_argument("file")
    sp.add_argument("--k", type=_even, required=True)
    sp.add_argument("--m")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("oracle", help="exhaustive reference computations")
    sp.add_argument("what", choices=("min-modality",))
    sp.add_argument("file")
    sp.add_argument("--budget", type=int, default=10**6)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("gen", help="random instances")
    sp.add_argument("cls", choices=("sp", "outerplanar", "planar", "cgraph", "formula"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-degree", type=int)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("nodetrix", help="NodeTrix planarity of a c-graph")
    sp.add_argument("file")
    rigid_arg(sp)
    sp.set_defaults(func=cmd_hybrid)
    sp = sub.add_parser("clique", help="clique planarity with r-combs")
    sp.add_argument("file")
    sp.add_argument("--combs", type=int, required=True)
    rigid_arg(sp)
    sp.set_defaults(func=cmd_hybrid)

    sp = sub.add_parser("naesat", help="solve a two-occurrence NAE formula")
    sp.add_argument("file")
    sp.add_argument("--brute", action="store_true")
    sp.set_defaults(func=cmd_naesat)

    sp = sub.add_parser("report", help="scaling table (CSV) and figure (PNG)")
    sp.add_argument("--out", default="report", help="output directory")
    sp.add_argument("--sizes", type=int, nargs="+", default=[10_000, 20_000, 40_000, 80_000],
                    help="vertex counts of the generated series-parallel digraphs")
    sp.add_argument("--k", type=_even, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-degree", type=int, default=6)
    sp.set_defaults(func=cmd_report)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else INPUT_ERROR
    try:
        return args.func(args)
    except UnsupportedInstance as exc:
        print(f"unsupported instance: {exc}")
        return UNSUPPORTED
    except NonplanarError:
        print("no (not planar)")
        return NO
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (InputError, GraphError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
