"""Operator algebra on Δ-closures: equivalence of Δ-sets, the composition
calculus, Boolean closure, meets and joins, and finite posets of operators
with their Hasse diagrams.

Operators are identified extensionally: two operators are the same poset
element when they agree on every subset of the evaluation domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, count, permutations, product
from typing import Sequence

import numpy as np

from .closure import (ClosureOperator, apply_operator, bottom_operator, dedupe_delta,
                      delta_operator, delta_step, operator_witnesses, semantic_operator)
from .logic import And, Exists, Not, ParamFormula, canonical, node_count, rename
from .pregeometry import SUBSET_CAP, check_regular_delta, evaluation_domain, is_regular_operator
from .structure import Structure

MAX_FORMULA_NODES = 10_000
MAX_POSET_SIZE = 64


class LatticeError(ValueError):
    pass


def _canon_key(pf):
    c = canonical(pf)
    return c.param_vars, c.body


def _dedupe_canonical(fs):
    seen, out = set(), []
    for pf in fs:
        key = _canon_key(pf)
        if key not in seen:
            seen.add(key)
            out.append(pf)
    return out


def operators_equivalent(s: Structure, d1: Sequence[ParamFormula], d2: Sequence[ParamFormula],
                         n: int | None = None, subset_cap: int = SUBSET_CAP) -> bool:
    """Whether the iterated Δ-operators agree on every subset of the domain."""
    op1, op2 = delta_operator(d1, n, True), delta_operator(d2, n, True)
    domain, _ = evaluation_domain(s.size, subset_cap)
    return all(apply_operator(s, op1, a) == apply_operator(s, op2, a) for a in domain)


# -- formula calculus ------------------------------------------------------------

def _compose(psi: ParamFormula, phis: Sequence[ParamFormula]) -> ParamFormula:
    """``exists u1..uk (psi(x, u1..uk) & phi_1(u1, y_1) & ... & phi_k(uk, y_k))``
    with each ``y_i`` a fresh parameter block."""
    fresh = (f"t{i}" for i in count())
    xv = next(fresh)
    us = [next(fresh) for _ in psi.param_vars]
    body = rename(psi.body, {psi.solution_var: xv, **dict(zip(psi.param_vars, us))}, fresh)
    params = []
    for u, phi in zip(us, phis):
        ps = [next(fresh) for _ in phi.param_vars]
        params += ps
        body = And(body, rename(phi.body, {phi.solution_var: u, **dict(zip(phi.param_vars, ps))}, fresh))
    for u in reversed(us):
        body = Exists(u, body)
    name = f"{psi.name}[{','.join(p.name for p in phis)}]"
    return canonical(ParamFormula(name, xv, tuple(params), body))


def compose_delta(delta: Sequence[ParamFormula], depth: int,
                  max_nodes: int = MAX_FORMULA_NODES) -> list[ParamFormula]:
    """Close Δ under the composition rule up to ``depth`` rounds.

    Round ``d`` adds ``psi[phi_1, ..., phi_k]`` for ``psi`` in Δ and every
    ``phi_i`` from round ``d-1``, so a formula of round ``d`` chains ``d+1``
    members of Δ.  Parameter blocks of the ``phi_i`` are kept separate; a
    shared parameter tuple is the special case of repeated arguments.
    Formulas equal up to renaming are kept once.  The input always heads
    the output.
    """
    if depth < 0:
        raise LatticeError("depth must be non-negative")
    delta = list(dedupe_delta(delta))
    current = delta
    for _ in range(depth):
        new = []
        for psi in delta:
            if psi.arity == 0:
                continue
            for phis in product(current, repeat=psi.arity):
                f = _compose(psi, phis)
                if node_count(f.body) > max_nodes:
                    raise LatticeError(f"composed formula {f.name} has {node_count(f.body)} nodes, "
                                       f"over the cap of {max_nodes}")
                new.append(f)
        current = _dedupe_canonical(delta + new)
    return current


def boolean_closure(delta: Sequence[ParamFormula], k: int,
                    max_nodes: int = MAX_FORMULA_NODES) -> list[ParamFormula]:
    """All conjunctions of at most ``k`` literals (members of Δ or their
    negations).  Each literal keeps its own parameter block, so the
    conjunction's parameters are the concatenation, and a literal may occur
    more than once with different parameters."""
    if k < 1:
        raise LatticeError("k must be at least 1")
    literals = [(pf, True) for pf in dedupe_delta(delta)] + [(pf, False) for pf in dedupe_delta(delta)]
    out = []
    for r in range(1, k + 1):
        for combo in combinations_with_replacement(literals, r):
            fresh = (f"t{i}" for i in count())
            xv = next(fresh)
            body, params, names = None, [], []
            for pf, positive in combo:
                ps = [next(fresh) for _ in pf.param_vars]
                params += ps
                lit = rename(pf.body, {pf.solution_var: xv, **dict(zip(pf.param_vars, ps))}, fresh)
                if not positive:
                    lit = Not(lit)
                body = lit if body is None else And(body, lit)
                names.append(pf.name if positive else f"not_{pf.name}")
            if node_count(body) > max_nodes:
                raise LatticeError(f"conjunction has {node_count(body)} nodes, over the cap of {max_nodes}")
            out.append(canonical(ParamFormula("_and_".join(names), xv, tuple(params), body)))
    return _dedupe_canonical(out)


# -- meet and join ------------------------------------------------------------------

def _require_regular(s, ops, subset_cap):
    for op in ops:
        if not is_regular_operator(s, op, subset_cap):
            raise LatticeError(f"operator {op.name!r} is not regular (reflexive and transitive)")


def meet(s: Structure, op1: ClosureOperator, op2: ClosureOperator, check: bool = True,
         subset_cap: int = SUBSET_CAP) -> ClosureOperator:
    """Greatest lower bound via common witnessed sets.

    The result maps A to the least superset A' of A that contains every set
    witnessed by both operators over A'.
    """
    if check:
        _require_regular(s, (op1, op2), subset_cap)
    if op1 == op2:
        return op1
    if op1.kind == "semantic" and op2.kind == "semantic":
        bounds = [b for b in (op1.bound, op2.bound) if b is not None]
        return semantic_operator(min(bounds) if bounds else None)
    bound = op1.bound if op1.bound == op2.bound else None
    return ClosureOperator(f"meet({op1.name},{op2.name})", "meet", bound, (), True, (op1, op2))


def join(s: Structure, op1: ClosureOperator, op2: ClosureOperator, check: bool = True,
         subset_cap: int = SUBSET_CAP, max_compose_depth: int = 3) -> ClosureOperator | None:
    """Least upper bound by transitive closure of the union.

    Unbounded operators always have a join.  For a bound n the accumulated
    fixpoint must be witnessed in one step by formulas of the transitive
    closure of Δ1 ∪ Δ2 with at most n solutions; if it is not, the pair has
    no join at bound n and ``None`` is returned.
    """
    if check:
        _require_regular(s, (op1, op2), subset_cap)
    if op1.bound != op2.bound and not (op1.kind == "semantic" or op2.kind == "semantic"):
        raise LatticeError("join requires operators with the same bound")
    for a, b in ((op1, op2), (op2, op1)):
        if a.kind == "semantic" and a.bound is None:
            return a
    name = f"join({op1.name},{op2.name})"
    if op1 == op2:
        return op1
    both_delta = op1.kind == "delta" and op2.kind == "delta"
    if op1.bound is None and both_delta:
        return delta_operator(op1.delta + op2.delta, None, True, name)
    fix = ClosureOperator(name, "join", op1.bound, (), True, (op1, op2))
    if op1.bound is None:
        return fix
    domain, _ = evaluation_domain(s.size, subset_cap)
    if both_delta:
        union = dedupe_delta(op1.delta + op2.delta)
        steps = 0
        for a in domain:
            cur, t = a, 0
            target = apply_operator(s, fix, a)
            while cur != target and t <= s.size:
                cur = cur | delta_step(s, union, cur, op1.bound)
                t += 1
            steps = max(steps, t)
        depth = min(max(steps - 1, 0), max_compose_depth)
        closed = compose_delta(union, depth)
        cand = delta_operator(closed, op1.bound, True, name)
        one = delta_operator(closed, op1.bound, False, name)
        if all(apply_operator(s, one, a) | a == apply_operator(s, fix, a) for a in domain):
            return cand
        return None
    for a in domain:
        fam = operator_witnesses(s, ClosureOperator(name, "join", op1.bound, (), True, (op1, op2)), a)
        if a.union(*fam) != apply_operator(s, fix, a):
            return None
    return fix


# -- posets ----------------------------------------------------------------------------

@dataclass
class OperatorPoset:
    elements: list
    leq: np.ndarray
    meets: dict
    joins: dict
    hasse_edges: list
    least: int | None
    greatest: int | None
    domain: list = field(repr=False, default_factory=list)
    mode: str = "semilattice"
    bound: int | None = None
    images: list = field(repr=False, default_factory=list)

    def __len__(self):
        return len(self.elements)

    def names(self) -> list[str]:
        return [op.name for op in self.elements]

    def index(self, name: str) -> int:
        return self.names().index(name)

    def find(self, s: Structure, op: ClosureOperator) -> int | None:
        """Index of the element extensionally equal to ``op``, if any."""
        sig = tuple(apply_operator(s, op, a) for a in self.domain)
        for i, img in enumerate(self.images):
            if img == sig:
                return i
        return None


def leq_from_images(images: Sequence[tuple]) -> np.ndarray:
    k = len(images)
    leq = np.zeros((k, k), dtype=bool)
    for i in range(k):
        for j in range(k):
            leq[i, j] = all(x <= y for x, y in zip(images[i], images[j]))
    return leq


def hasse_from_leq(leq: np.ndarray) -> list[tuple[int, int]]:
    k = len(leq)
    lt = leq & ~np.eye(k, dtype=bool)
    edges = []
    for i in range(k):
        for j in range(k):
            if lt[i, j] and not any(lt[i, m] and lt[m, j] for m in range(k)):
                edges.append((i, j))
    return edges


def bounds_tables(leq: np.ndarray):
    """glb and lub tables from an order matrix; entries are None where the
    bound does not exist."""
    k = len(leq)
    meets, joins = {}, {}
    for i in range(k):
        for j in range(k):
            lower = [m for m in range(k) if leq[m, i] and leq[m, j]]
            glb = [m for m in lower if all(leq[z, m] for z in lower)]
            meets[i, j] = glb[0] if glb else None
            upper = [m for m in range(k) if leq[i, m] and leq[j, m]]
            lub = [m for m in upper if all(leq[m, z] for z in upper)]
            joins[i, j] = lub[0] if lub else None
    return meets, joins


def _extreme(leq, least=True):
    k = len(leq)
    for i in range(k):
        if all(leq[i, j] if least else leq[j, i] for j in range(k)):
            return i
    return None


def poset_from_operators(s: Structure, ops: Sequence[ClosureOperator], domain=None,
                         mode: str = "semilattice", bound=None) -> OperatorPoset:
    if domain is None:
        domain, _ = evaluation_domain(s.size)
    images = [tuple(apply_operator(s, op, a) for a in domain) for op in ops]
    leq = leq_from_images(images)
    meets, joins = bounds_tables(leq)
    return OperatorPoset(list(ops), leq, meets, joins, hasse_from_leq(leq),
                         _extreme(leq, True), _extreme(leq, False), list(domain), mode, bound, images)


def build_poset(s: Structure, seeds: Sequence[tuple[str, Sequence[ParamFormula]]],
                mode: str = "semilattice", n: int | None = None,
                adjoin: Sequence[ClosureOperator] = (), subset_cap: int = SUBSET_CAP,
                max_elements: int = MAX_POSET_SIZE) -> OperatorPoset:
    """Close regular seed operators under meet (and join, in lattice mode).

    The bottom operator (witnessed by ``x = y`` alone) is always adjoined;
    ``adjoin`` adds further operators, such as the semantic ``acl``.
    Extensionally equal operators are merged, keeping the first name.
    Elements are reported sorted by name.
    """
    if mode not in ("semilattice", "lattice"):
        raise LatticeError(f"unknown mode {mode!r}")
    domain, _ = evaluation_domain(s.size, subset_cap)
    ops = []
    for name, delta in seeds:
        rep = check_regular_delta(s, delta, n, subset_cap)
        if not rep.regular:
            what = "acl-reflexive" if not rep.acl_reflexive else "acl-transitive"
            raise LatticeError(f"seed {name!r} is not regular at bound {n}: not {what} "
                               f"({ {k: v for k, v in rep.witnesses.items() if k.startswith('not_')} })")
        ops.append(delta_operator(delta, n, True, name))
    elements, images = [], {}

    def add(op):
        sig = tuple(apply_operator(s, op, a) for a in domain)
        if sig in images:
            return False
        if len(elements) >= max_elements:
            raise LatticeError(f"poset exceeds {max_elements} elements")
        images[sig] = len(elements)
        elements.append(op)
        return True

    for op in ops:
        add(op)
    add(bottom_operator(n))
    for op in adjoin:
        add(op)
    done = set()
    changed = True
    while changed:
        changed = False
        for i, j in combinations(range(len(elements)), 2):
            if (i, j) in done:
                continue
            done.add((i, j))
            a, b = elements[i], elements[j]
            changed |= add(meet(s, a, b, check=False))
            if mode == "lattice":
                jn = join(s, a, b, check=False, subset_cap=subset_cap)
                if jn is not None:
                    changed |= add(jn)
    elements.sort(key=lambda op: op.name)
    return poset_from_operators(s, elements, domain, mode, n)


# -- statistics -------------------------------------------------------------------------

@dataclass
class LatticeStats:
    height: int
    width: int
    least: str | None
    greatest: str | None
    distributive: bool | None
    is_lattice: bool


def _height(leq):
    k = len(leq)
    lt = leq & ~np.eye(k, dtype=bool)
    order = sorted(range(k), key=lambda i: int(leq[:, i].sum()))
    best = [1] * k
    for j in order:
        for i in range(k):
            if lt[i, j]:
                best[j] = max(best[j], best[i] + 1)
    return max(best, default=0)


def _width(leq):
    """Maximum antichain size: k minus a maximum matching in the strict
    comparability graph (Dilworth)."""
    k = len(leq)
    lt = leq & ~np.eye(k, dtype=bool)
    match_to = [-1] * k

    def augment(i, seen):
        for j in range(k):
            if lt[i, j] and j not in seen:
                seen.add(j)
                if match_to[j] < 0 or augment(match_to[j], seen):
                    match_to[j] = i
                    return True
        return False

    matching = sum(augment(i, set()) for i in range(k))
    return k - matching


def is_distributive(p: OperatorPoset) -> bool | None:
    """x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z) for all triples; None if some meet or
    join is missing."""
    k = len(p)
    if any(v is None for v in p.meets.values()) or any(v is None for v in p.joins.values()):
        return None
    m, j = p.meets, p.joins
    return all(m[x, j[y, z]] == j[m[x, y], m[x, z]]
               for x in range(k) for y in range(k) for z in range(k))


def lattice_stats(p: OperatorPoset, cap: int = MAX_POSET_SIZE) -> LatticeStats:
    """Height (longest chain, counted in elements), width (largest antichain),
    extremes, and distributivity."""
    if len(p) > cap:
        raise LatticeError(f"poset of {len(p)} elements exceeds the cap of {cap}")
    names = p.names()
    dist = is_distributive(p)
    return LatticeStats(_height(p.leq), _width(p.leq),
                        None if p.least is None else names[p.least],
                        None if p.greatest is None else names[p.greatest],
                        dist, dist is not None)


def boolean_lattice(k: int) -> np.ndarray:
    """Order matrix of the subsets of a k-element set."""
    subsets = [frozenset(c) for r in range(k + 1) for c in combinations(range(k), r)]
    return np.array([[a <= b for b in subsets] for a in subsets], dtype=bool)


def isomorphic(leq1: np.ndarray, leq2: np.ndarray) -> bool:
    """Order isomorphism by brute force over bijections (small posets)."""
    if leq1.shape != leq2.shape:
        return False
    k = len(leq1)
    if sorted(leq1.sum(0)) != sorted(leq2.sum(0)) or sorted(leq1.sum(1)) != sorted(leq2.sum(1)):
        return False
    for perm in permutations(range(k)):
        if all(leq1[i, j] == leq2[perm[i], perm[j]] for i in range(k) for j in range(k)):
            return True
    return False


def _dot_escape(text):
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_hasse_dot(p: OperatorPoset) -> str:
    """Graphviz DOT text of the Hasse diagram, least element at the bottom."""
    lines = ["digraph operators {", "  rankdir=BT;", "  node [shape=box];"]
    for i, op in enumerate(p.elements):
        if op.kind == "delta":
            summary = "{" + ", ".join(pf.name for pf in op.delta) + "}"
        elif op.kind == "semantic":
            summary = "semantic"
        else:
            summary = op.kind
        label = _dot_escape(f"{op.name}\\n{summary}").replace("\\\\n", "\\n")
        lines.append(f'  n{i} [label="{label}"];')
    if p.least is not None:
        lines.append(f"  {{ rank=source; n{p.least}; }}")
    for i, j in p.hasse_edges:
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
