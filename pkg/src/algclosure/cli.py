"""Command-line entry point.

Every subcommand prints deterministic text, or a JSON document with a
top-level ``"schema": 1`` when ``--json`` is given.  Exit status is 0 on
success, 1 on a domain error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algsets import DEG_alg_u, deg_alg_u, enumerate_algebraic_sets
from .automorphisms import SizeCapError, is_rigid, orbits
from .closure import (ClosureError, acl_dcl_difference, apply_operator, closure_chain,
                      deg_acl_of_structure, delta_operator, semantic_operator, subsets_up_to)
from .lattice import LatticeError, build_poset, export_hasse_dot, lattice_stats
from .logic import FormulaError, parse_delta
from .pregeometry import GeometryError, check_axioms
from .structure import (FIXTURE_KINDS, StructureError, generate_fixture, parse_structure,
                        serialize_structure, structure_to_json)

SCHEMA = 1
DOMAIN_ERRORS = (StructureError, FormulaError, ClosureError, LatticeError, GeometryError,
                 SizeCapError, OSError, ValueError)


class UsageError(Exception):
    pass


def fmt_set(xs) -> str:
    xs = sorted(xs)
    return "{" + ", ".join(map(str, xs)) + "}" if xs else "∅"


def parse_elements(text: str) -> frozenset:
    """``""`` is the empty set; otherwise comma-separated decimals."""
    text = text.strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated elements, got {text!r}")


def arg_elements(text: str) -> str:
    return ",".join(map(str, sorted(parse_elements(text))))


def _load_structure(path):
    return parse_structure(Path(path).read_text())


def _load_delta(path, s):
    return parse_delta(Path(path).read_text(), s.signature)


def _check_elements(s, a):
    bad = sorted(e for e in a if not 0 <= e < s.size)
    if bad:
        raise ClosureError(f"elements {bad} are outside the universe of size {s.size}")
    return a


def _operator_label(kind, n, iterate=False):
    if kind == "semantic":
        return "acl" if n is None else ("dcl" if n == 1 else f"acl_{n}")
    base = "acl^Δ" + ("" if n is None else f"_{n}")
    return base + ("*" if iterate else "")


def _emit(args, obj, text):
    if args.json:
        print(json.dumps({"schema": SCHEMA, "command": args.command, **obj}, sort_keys=True, indent=2))
    else:
        print(text)


# -- subcommands --------------------------------------------------------------------

def cmd_gen(args):
    params = []
    for p in args.params:
        params += [int(x) for x in p.split(",") if x.strip()]
    s = generate_fixture(args.kind, params)
    out = structure_to_json(s) if args.json else serialize_structure(s)
    if args.output:
        Path(args.output).write_text(out if out.endswith("\n") else out + "\n")
    else:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")


def cmd_orbits(args):
    s = _load_structure(args.structure)
    a = _check_elements(s, parse_elements(args.A))
    blocks = orbits(s, a).blocks
    lines = [f"orbits over {fmt_set(a)}: {len(blocks)}"] + [f"  {fmt_set(b)}" for b in blocks]
    if not a:
        lines.append(f"rigid: {'yes' if is_rigid(s) else 'no'}")
    _emit(args, {"A": sorted(a), "orbits": [sorted(b) for b in blocks]}, "\n".join(lines))


def cmd_closure(args):
    s = _load_structure(args.structure)
    a = _check_elements(s, parse_elements(args.A))
    n = None if args.unbounded else args.n
    if args.delta:
        op = delta_operator(_load_delta(args.delta, s), n, iterate=args.iterate)
        label = _operator_label("delta", n, args.iterate)
    else:
        if args.iterate:
            raise UsageError("--iterate requires --delta")
        op = semantic_operator(n)
        label = _operator_label("semantic", n)
    c = apply_operator(s, op, a)
    _emit(args, {"A": sorted(a), "bound": n, "operator": label, "closure": sorted(c)},
          f"{label}({fmt_set(a)}) = {fmt_set(c)}")


def cmd_chain(args):
    s = _load_structure(args.structure)
    a = _check_elements(s, parse_elements(args.A))
    ch = closure_chain(s, a)
    lines = [f"acl_{i}({fmt_set(a)}) = {fmt_set(x)}" for i, x in enumerate(ch.sets)]
    lines.append(f"stabilizes at n = {ch.stabilization_index}")
    _emit(args, {"A": sorted(a), "chain": [sorted(x) for x in ch.sets],
                 "stabilization_index": ch.stabilization_index}, "\n".join(lines))


def cmd_degree(args):
    s = _load_structure(args.structure)
    k = s.size if args.max_subset is None else args.max_subset
    rep = deg_acl_of_structure(s, k)
    text = (f"deg_acl = {rep.structure_degree} (witness A = {fmt_set(rep.witness)})\n"
            f"sets checked: {len(rep.per_set)} of size <= {k}; exhaustive: {'yes' if rep.exhaustive else 'no'}\n"
            f"stabilization index: {rep.stabilization_index}")
    _emit(args, {"degree": rep.structure_degree, "witness": sorted(rep.witness),
                 "max_subset_size": k, "sets_checked": len(rep.per_set),
                 "exhaustive": rep.exhaustive, "stabilization_index": rep.stabilization_index}, text)


def cmd_diff(args):
    s = _load_structure(args.structure)
    d = acl_dcl_difference(s)
    _emit(args, {"acl_dcl_difference": d, "scope": "within-model"},
          f"acl-dcl-difference (within-model): {d}")


def cmd_algsets(args):
    s = _load_structure(args.structure)
    a = _check_elements(s, parse_elements(args.A))
    k = s.size if args.max_size is None else args.max_size
    sets = enumerate_algebraic_sets(s, a, k)
    lines = [f"{len(sets)} {fmt_set(a)}-algebraic sets of size <= {k}"]
    lines += [f"  {fmt_set(b)}  deg = {deg_alg_u(s, a, b)}" for b in sets]
    big = DEG_alg_u(s, a)
    lines.append(f"DEG_alg_u({fmt_set(a)}) = {big}")
    _emit(args, {"A": sorted(a), "max_size": k,
                 "sets": [{"set": sorted(b), "deg": deg_alg_u(s, a, b)} for b in sets],
                 "DEG_alg_u": big}, "\n".join(lines))


def _rerun(args, x, n):
    base = f"algclosure closure -s {args.structure} -A \"{','.join(map(str, sorted(x)))}\" --n {n}"
    return base + (f" --delta {args.delta}" if args.delta else "")


def _counterexample_lines(args, r, n, label):
    ce = r.counterexample
    x = ce["X"]
    if r.axiom == "exchange":
        a, b = ce["a"], ce["b"]
        return [f"    X = {fmt_set(x)}, a = {a}, b = {b}: "
                f"a in {label}(X+b), a not in {label}(X), b not in {label}(X+a)",
                f"    $ {_rerun(args, x | {b}, n)}    # contains {a}",
                f"    $ {_rerun(args, x, n)}    # lacks {a}",
                f"    $ {_rerun(args, x | {a}, n)}    # lacks {b}"]
    if r.axiom == "finite-character":
        return [f"    X = {fmt_set(x)}, a = {ce['a']} not witnessed by any subset of size <= {ce['bound']}",
                f"    $ {_rerun(args, x, n)}    # contains {ce['a']}"]
    if r.axiom == "transitivity":
        once = ce["cl(X)"]
        return [f"    X = {fmt_set(x)}: {label}(X) = {fmt_set(once)}, {label}({label}(X)) = {fmt_set(ce['cl(cl(X))'])}",
                f"    $ {_rerun(args, x, n)}",
                f"    $ {_rerun(args, once, n)}"]
    return [f"    X = {fmt_set(x)}: {label}(X) = {fmt_set(ce.get('cl(X)', ce.get('missing', ())))}",
            f"    $ {_rerun(args, x, n)}"]


def _jsonable(ce):
    if ce is None:
        return None
    return {k: sorted(v) if isinstance(v, frozenset) else v for k, v in ce.items()}


def cmd_axioms(args):
    s = _load_structure(args.structure)
    if args.semantic == bool(args.delta):
        raise UsageError("axioms needs exactly one of --semantic or --delta FILE")
    if args.delta:
        op = delta_operator(_load_delta(args.delta, s), args.n, iterate=False)
        label = _operator_label("delta", args.n)
    else:
        op = semantic_operator(args.n)
        label = _operator_label("semantic", args.n)
    reports = check_axioms(s, op)
    lines = [f"axioms for {label} on {s.name or args.structure} (N = {s.size})"]
    for r in reports:
        scope = "" if r.exhaustive else " (sampled)"
        lines.append(f"  {r.axiom:<17} {'holds' if r.holds else 'FAILS'}{scope}")
        if r.counterexample is not None:
            lines += _counterexample_lines(args, r, args.n, label)
    _emit(args, {"operator": label, "bound": args.n,
                 "axioms": [{"axiom": r.axiom, "holds": r.holds, "exhaustive": r.exhaustive,
                             "subsets_checked": r.subsets_checked,
                             "counterexample": _jsonable(r.counterexample)} for r in reports]},
          "\n".join(lines))


def cmd_lattice(args):
    s = _load_structure(args.structure)
    seeds = [(Path(f).stem, _load_delta(f, s)) for f in args.seeds.split(",") if f]
    if not seeds:
        raise UsageError("--seeds needs at least one file")
    p = build_poset(s, seeds, args.mode, args.n)
    st = lattice_stats(p)
    names = p.names()
    text = [f"{len(p)} operators; least: {st.least or 'none'}; greatest: {st.greatest or 'none'}"]
    text += [f"  {op.name}: {op.describe()}" for op in p.elements]
    text += [f"  {names[i]} < {names[j]}" for i, j in p.hasse_edges]
    text.append(f"height {st.height}; width {st.width}; distributive: "
                f"{'n/a' if st.distributive is None else ('yes' if st.distributive else 'no')}")
    if args.dot:
        Path(args.dot).write_text(export_hasse_dot(p))
    _emit(args, {"mode": args.mode, "bound": args.n, "operators": names,
                 "hasse": [[names[i], names[j]] for i, j in p.hasse_edges],
                 "least": st.least, "greatest": st.greatest, "height": st.height,
                 "width": st.width, "distributive": st.distributive}, "\n".join(text))


def cmd_report(args):
    s = _load_structure(args.structure)
    lines = [f"structure {s.name or args.structure}: N = {s.size}; relations "
             + ", ".join(f"{r}/{k}" for r, k in s.signature.relations)]
    small = list(subsets_up_to(s.size, 1))
    orbit_rows = []
    for a in small:
        blocks = orbits(s, a).blocks
        orbit_rows.append({"A": sorted(a), "orbit_sizes": [len(b) for b in blocks]})
        lines.append(f"  orbits over {fmt_set(a)}: " + " ".join(fmt_set(b) for b in blocks))
    k = min(2, s.size)
    rep = deg_acl_of_structure(s, k)
    diff = acl_dcl_difference(s)
    lines.append(f"deg_acl over |A| <= {k}: {rep.structure_degree} (witness {fmt_set(rep.witness)})")
    lines.append(f"acl-dcl-difference (within-model): {diff}")
    n = max(rep.structure_degree - 1, 1)
    reports = check_axioms(s, semantic_operator(n))
    label = _operator_label("semantic", n)
    lines.append(f"axioms for {label}:")
    lines += [f"  {r.axiom:<17} {'holds' if r.holds else 'FAILS'}" for r in reports]
    _emit(args, {"size": s.size, "orbits": orbit_rows, "degree": rep.structure_degree,
                 "acl_dcl_difference": diff, "axiom_operator": label,
                 "axioms": {r.axiom: r.holds for r in reports}}, "\n".join(lines))


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    with_s = argparse.ArgumentParser(add_help=False, parents=[common])
    with_s.add_argument("-s", dest="structure", required=True, help="structure file")

    p = argparse.ArgumentParser(prog="algclosure", description="Algebraic closure on finite structures")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a fixture structure")
    g.add_argument("kind", choices=FIXTURE_KINDS)
    g.add_argument("params", nargs="*", help="integers, comma- or space-separated")
    g.add_argument("-o", dest="output")

    o = sub.add_parser("orbits", parents=[with_s], help="orbits of the stabilizer of A")
    o.add_argument("-A", default="", type=arg_elements)

    c = sub.add_parser("closure", parents=[with_s], help="semantic or Δ-closure of A")
    c.add_argument("-A", default="", type=arg_elements)
    bound = c.add_mutually_exclusive_group()
    bound.add_argument("--n", type=int)
    bound.add_argument("--unbounded", action="store_true")
    c.add_argument("--delta")
    c.add_argument("--iterate", action="store_true")

    ch = sub.add_parser("chain", parents=[with_s], help="acl_0(A) ⊆ acl_1(A) ⊆ ... ⊆ acl(A)")
    ch.add_argument("-A", required=True, type=arg_elements)

    d = sub.add_parser("degree", parents=[with_s], help="degree of algebraization")
    d.add_argument("--max-subset", type=int)

    sub.add_parser("diff", parents=[with_s], help="acl-dcl-difference")

    a = sub.add_parser("algsets", parents=[with_s], help="A-algebraic sets")
    a.add_argument("-A", required=True, type=arg_elements)
    a.add_argument("--max-size", type=int)

    x = sub.add_parser("axioms", parents=[with_s], help="pregeometry axiom table")
    x.add_argument("--semantic", action="store_true")
    x.add_argument("--delta")
    x.add_argument("--n", type=int, required=True)

    lt = sub.add_parser("lattice", parents=[with_s], help="poset of regular Δ-operators")
    lt.add_argument("--seeds", required=True, help="comma-separated Δ files")
    lt.add_argument("--mode", choices=("semilattice", "lattice"), default="semilattice")
    lt.add_argument("--n", type=int)
    lt.add_argument("--dot")

    sub.add_parser("report", parents=[with_s], help="one-page summary")
    return p


COMMANDS = {"gen": cmd_gen, "orbits": cmd_orbits, "closure": cmd_closure, "chain": cmd_chain,
            "degree": cmd_degree, "diff": cmd_diff, "algsets": cmd_algsets, "axioms": cmd_axioms,
            "lattice": cmd_lattice, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for attr in ("n", "max_subset", "max_size"):
        v = getattr(args, attr, None)
        if v is not None and v < 0:
            print(f"error: --{attr.replace('_', '-')} must be non-negative", file=sys.stderr)
            return 2
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
