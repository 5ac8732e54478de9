"""Finite relational structures: representation, validation, text/JSON I/O and
fixture generators.

The universe of a structure is always ``{0, ..., N-1}``.  Relations are stored
as frozensets of integer tuples; constants map names to elements.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np

ElementSet = frozenset

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class StructureError(ValueError):
    """Raised for malformed structure text or invalid structures."""


@dataclass(frozen=True)
class Signature:
    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def arity(self, name: str) -> int:
        for rel, k in self.relations:
            if rel == name:
                return k
        raise KeyError(name)

    def has_relation(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.relations)


@dataclass(frozen=True, eq=False)
class Structure:
    """An immutable finite relational structure.

    ``relations`` maps relation names to sets of tuples; ``constants`` maps
    constant names to elements.  Use :func:`validate_structure` to check the
    invariants; the constructor does not.
    """

    signature: Signature
    size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)
    name: str = "structure"

    @cached_property
    def _key(self):
        rels = tuple(sorted((k, tuple(sorted(v))) for k, v in self.relations.items()))
        consts = tuple(sorted(self.constants.items()))
        return (self.name, self.signature, self.size, rels, consts)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        rels = ", ".join(f"{r}/{k}" for r, k in self.signature.relations)
        return f"Structure({self.name!r}, N={self.size}, [{rels}])"

    @property
    def universe(self) -> range:
        return range(self.size)

    @cached_property
    def arrays(self) -> dict[str, np.ndarray]:
        """Dense boolean array per relation, shape ``(N,) * arity``."""
        out = {}
        for rel, k in self.signature.relations:
            arr = np.zeros((self.size,) * k, dtype=bool)
            for t in self.relations.get(rel, ()):
                arr[t] = True
            out[rel] = arr
        return out


def validate_structure(s: Structure) -> list[str]:
    """Return one diagnostic string per violated invariant (empty if valid)."""
    diags = []
    if not isinstance(s.size, int) or s.size < 1:
        diags.append(f"universe size must be a positive integer, got {s.size!r}")
        return diags
    seen = set()
    for rel, k in s.signature.relations:
        if rel in seen:
            diags.append(f"duplicate name {rel!r}")
        seen.add(rel)
        if not isinstance(k, int) or k < 1:
            diags.append(f"relation {rel!r} has invalid arity {k!r}")
    for c in s.signature.constants:
        if c in seen:
            diags.append(f"duplicate name {c!r}")
        seen.add(c)
    for rel, k in s.signature.relations:
        if rel not in s.relations:
            diags.append(f"relation {rel!r} declared but not interpreted")
            continue
        for t in sorted(s.relations[rel]):
            if len(t) != k:
                diags.append(f"relation {rel!r}: tuple {t} has length {len(t)}, expected {k}")
            elif any(not isinstance(e, int) or not 0 <= e < s.size for e in t):
                diags.append(f"relation {rel!r}: tuple {t} has element out of range")
    for rel in sorted(s.relations):
        if not s.signature.has_relation(rel):
            diags.append(f"relation {rel!r} interpreted but not declared")
    for c in s.signature.constants:
        if c not in s.constants:
            diags.append(f"constant {c!r} declared but not interpreted")
        elif not isinstance(s.constants[c], int) or not 0 <= s.constants[c] < s.size:
            diags.append(f"constant {c!r} = {s.constants[c]!r} is out of range")
    for c in sorted(s.constants):
        if c not in s.signature.constants:
            diags.append(f"constant {c!r} interpreted but not declared")
    return diags


def make_structure(size: int, relations: Mapping[str, tuple[int, Iterable]],
                   constants: Mapping[str, int] | None = None,
                   name: str = "structure") -> Structure:
    """Build and validate a structure from ``{name: (arity, tuples)}``."""
    constants = dict(constants or {})
    sig = Signature(tuple((r, k) for r, (k, _) in relations.items()), tuple(constants))
    rels = {r: frozenset(tuple(t) for t in ts) for r, (_, ts) in relations.items()}
    s = Structure(sig, size, rels, constants, name)
    diags = validate_structure(s)
    if diags:
        raise StructureError("; ".join(diags))
    return s


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}(),/=])
""", re.VERBOSE)


def _tokenize(text: str):
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise StructureError(f"syntax error at line {line}, column {col}: "
                                 f"unexpected character {text[pos]!r}")
        kind, val = m.lastgroup, m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                yield kind, val, line, col
            col += len(val)
        pos = m.end()
    yield "eof", "", line, col


class _StructureParser:
    def __init__(self, text):
        self.toks = list(_tokenize(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (val is not None and tok[1] != val):
            want = repr(val) if val is not None else kind
            got = tok[1] or "end of input"
            raise StructureError(f"syntax error at line {tok[2]}, column {tok[3]}: "
                                 f"expected {want}, got {got!r}")
        self.i += 1
        return tok

    def error(self, tok, msg):
        return StructureError(f"{msg} at line {tok[2]}, column {tok[3]}")

    def parse(self) -> Structure:
        name, size = "structure", None
        rel_decls, rel_tuples, consts = [], {}, {}
        names = set()
        while self.peek()[0] != "eof":
            kw = self.take("ident")
            if kw[1] == "structure":
                name = self.take("ident")[1]
            elif kw[1] == "universe":
                tok = self.take("int")
                size = int(tok[1])
                if size < 1:
                    raise self.error(tok, "universe size must be positive")
            elif kw[1] == "relation":
                if size is None:
                    raise self.error(kw, "relation declared before universe")
                rtok = self.take("ident")
                self.take("punct", "/")
                atok = self.take("int")
                arity = int(atok[1])
                if arity < 1:
                    raise self.error(atok, "arity must be at least 1")
                if rtok[1] in names:
                    raise self.error(rtok, f"duplicate name {rtok[1]!r}")
                names.add(rtok[1])
                self.take("punct", "{")
                tuples = set()
                while self.peek()[1] != "}":
                    start = self.take("punct", "(")
                    elems = [self._element(size)]
                    while self.peek()[1] == ",":
                        self.take("punct", ",")
                        elems.append(self._element(size))
                    self.take("punct", ")")
                    if len(elems) != arity:
                        raise self.error(start, f"arity mismatch for {rtok[1]}/{arity}: "
                                                f"tuple has {len(elems)} elements")
                    tuples.add(tuple(elems))
                self.take("punct", "}")
                rel_decls.append((rtok[1], arity))
                rel_tuples[rtok[1]] = frozenset(tuples)
            elif kw[1] == "constant":
                if size is None:
                    raise self.error(kw, "constant declared before universe")
                ctok = self.take("ident")
                if ctok[1] in names:
                    raise self.error(ctok, f"duplicate name {ctok[1]!r}")
                names.add(ctok[1])
                self.take("punct", "=")
                consts[ctok[1]] = self._element(size)
            else:
                raise self.error(kw, f"syntax error: unknown statement {kw[1]!r}")
        if size is None:
            tok = self.peek()
            raise self.error(tok, "missing universe declaration")
        sig = Signature(tuple(rel_decls), tuple(consts))
        return Structure(sig, size, rel_tuples, consts, name)

    def _element(self, size):
        tok = self.take("int")
        e = int(tok[1])
        if e >= size:
            raise self.error(tok, f"element out of range: {e} (universe {size})")
        return e


def parse_structure(text: str) -> Structure:
    """Parse the line-oriented structure format (or its JSON mirror).

    >>> s = parse_structure("universe 2\\nrelation E/2 { (0,1) (1,0) }")
    >>> s.size, sorted(s.relations["E"])
    (2, [(0, 1), (1, 0)])
    """
    if text.lstrip().startswith("{"):
        return structure_from_json(text)
    return _StructureParser(text).parse()


def serialize_structure(s: Structure) -> str:
    lines = [f"structure {s.name}", f"universe {s.size}"]
    for rel, k in s.signature.relations:
        tuples = " ".join("(" + ",".join(map(str, t)) + ")"
                          for t in sorted(s.relations.get(rel, ())))
        lines.append(f"relation {rel}/{k} {{ {tuples} }}" if tuples
                     else f"relation {rel}/{k} {{ }}")
    for c in s.signature.constants:
        lines.append(f"constant {c} = {s.constants[c]}")
    return "\n".join(lines) + "\n"


def structure_to_json(s: Structure) -> str:
    doc = {
        "name": s.name,
        "size": s.size,
        "relations": [{"name": r, "arity": k,
                       "tuples": [list(t) for t in sorted(s.relations.get(r, ()))]}
                      for r, k in s.signature.relations],
        "constants": {c: s.constants[c] for c in s.signature.constants},
    }
    return json.dumps(doc, indent=2) + "\n"


def structure_from_json(text: str) -> Structure:
    try:
        doc = json.loads(text)
        rels = {r["name"]: (int(r["arity"]), [tuple(t) for t in r["tuples"]])
                for r in doc.get("relations", [])}
        if len(rels) != len(doc.get("relations", [])):
            raise StructureError("duplicate relation name")
        return make_structure(int(doc["size"]), rels, doc.get("constants", {}),
                              doc.get("name", "structure"))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise StructureError(f"malformed JSON structure: {exc}") from exc


# -- fixtures ------------------------------------------------------------------

FIXTURE_KINDS = ("equivalence", "complete-bipartite", "cyclic-order",
                 "linear-order", "colored-hypergraph-tree")


def _positive(params, *names):
    for n in names:
        v = params[n]
        if not isinstance(v, int) or v < 1:
            raise StructureError(f"parameter {n} must be a positive integer, got {v!r}")


def equivalence(class_sizes: Sequence[int]) -> Structure:
    """Equivalence relation ``E`` with consecutive classes of the given sizes."""
    if not class_sizes or any(not isinstance(c, int) or c < 1 for c in class_sizes):
        raise StructureError(f"class sizes must be positive integers, got {class_sizes!r}")
    tuples, start = [], 0
    for c in class_sizes:
        block = range(start, start + c)
        tuples += [(a, b) for a in block for b in block]
        start += c
    tag = "_".join(map(str, class_sizes))
    return make_structure(start, {"E": (2, tuples)}, name=f"equivalence_{tag}")


def complete_bipartite(n: int, m: int, copies: int = 1) -> Structure:
    """Disjoint copies of K_{n,m} with symmetric edge relation ``R``.

    Copy ``c`` occupies ``c*(n+m) ..``; its first ``n`` elements form the
    U-part, the next ``m`` the V-part.
    """
    _positive({"n": n, "m": m, "copies": copies}, "n", "m", "copies")
    tuples = []
    for c in range(copies):
        base = c * (n + m)
        for u in range(base, base + n):
            for v in range(base + n, base + n + m):
                tuples += [(u, v), (v, u)]
    return make_structure(copies * (n + m), {"R": (2, tuples)},
                          name=f"bipartite_{n}_{m}_{copies}")


def cyclic_order(n: int) -> Structure:
    """Ternary ``C(a,b,c)``: ``b`` lies strictly between ``a`` and ``c`` going clockwise."""
    _positive({"n": n}, "n")
    tuples = [(a, b, c) for a in range(n) for b in range(n) for c in range(n)
              if 0 < (b - a) % n < (c - a) % n]
    return make_structure(n, {"C": (3, tuples)}, name=f"cyclic_{n}")


def linear_order(n: int) -> Structure:
    """Strict chain ``0 < 1 < ... < n-1`` as relation ``less``."""
    _positive({"n": n}, "n")
    tuples = [(a, b) for a in range(n) for b in range(n) if a < b]
    return make_structure(n, {"less": (2, tuples)}, name=f"chain_{n}")


def colored_hypergraph_tree(class_size: int, colors: int, depth: int) -> Structure:
    """Acyclic finite fragment of a hypergraph whose hyperedges are the classes of
    equivalence relations ``E1 .. E<colors>``.

    The root is an ``E1``-class ``{0 .. class_size-1}``.  At each level every
    element created at the previous level receives one new class of each
    color other than the one that introduced it.  Elements without a
    nontrivial class of some color sit in a singleton class of that color
    (the leaves are where the finite fragment departs from the infinite
    hypergraph, in which every element lies in a class of every color).
    """
    if not isinstance(depth, int) or depth < 0:
        raise StructureError(f"depth must be a non-negative integer, got {depth!r}")
    _positive({"class_size": class_size, "colors": colors}, "class_size", "colors")
    classes = {c: [] for c in range(1, colors + 1)}
    root = list(range(class_size))
    classes[1].append(root)
    frontier = [(e, 1) for e in root]
    nxt = class_size
    for _ in range(depth):
        new_frontier = []
        for e, came_from in frontier:
            for c in range(1, colors + 1):
                if c == came_from:
                    continue
                members = [e] + list(range(nxt, nxt + class_size - 1))
                nxt += class_size - 1
                classes[c].append(members)
                new_frontier += [(m, c) for m in members[1:]]
        frontier = new_frontier
    size = nxt
    rels = {}
    for c in range(1, colors + 1):
        pairs = {(a, a) for a in range(size)}
        for cls in classes[c]:
            pairs |= {(a, b) for a in cls for b in cls}
        rels[f"E{c}"] = (2, pairs)
    return make_structure(size, rels, name=f"hypertree_{class_size}_{colors}_{depth}")


def generate_fixture(kind: str, params: Mapping | Sequence | None = None) -> Structure:
    """Generate one of the named fixture families.

    ``params`` is a mapping of the keyword arguments of the corresponding
    generator (``equivalence``, ``complete_bipartite``, ``cyclic_order``,
    ``linear_order``, ``colored_hypergraph_tree``) or a positional sequence.
    """
    gens = {
        "equivalence": equivalence,
        "complete-bipartite": complete_bipartite,
        "cyclic-order": cyclic_order,
        "linear-order": linear_order,
        "colored-hypergraph-tree": colored_hypergraph_tree,
    }
    if kind not in gens:
        raise StructureError(f"unknown fixture kind {kind!r}; expected one of {', '.join(FIXTURE_KINDS)}")
    params = params if params is not None else ()
    try:
        if isinstance(params, Mapping):
            return gens[kind](**params)
        if kind == "equivalence" and params and not isinstance(params[0], int):
            return gens[kind](*params)
        if kind == "equivalence":
            return gens[kind](list(params))
        return gens[kind](*params)
    except TypeError as exc:
        raise StructureError(f"bad parameters for {kind}: {exc}") from exc


def is_equivalence_relation(s: Structure, rel: str) -> bool:
    """Brute-force check that a binary relation is reflexive on its field,
    symmetric and transitive."""
    pairs = s.relations[rel]
    field_ = {a for t in pairs for a in t}
    if any((a, a) not in pairs for a in field_):
        return False
    if any((b, a) not in pairs for a, b in pairs):
        return False
    return all((a, c) in pairs for a, b in pairs for b2, c in pairs if b == b2)


def apply_permutation(s: Structure, perm: Sequence[int]) -> Structure:
    """Image of ``s`` under an element relabelling."""
    rels = {r: frozenset(tuple(perm[e] for e in t) for t in ts) for r, ts in s.relations.items()}
    consts = {c: perm[e] for c, e in s.constants.items()}
    return Structure(s.signature, s.size, rels, consts, s.name)


def brute_force_automorphisms(s: Structure):
    """All automorphisms by trying every permutation (tiny structures only)."""
    return [p for p in permutations(range(s.size)) if apply_permutation(s, p) == s]
