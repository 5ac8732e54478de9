"""Closure operators on finite structures.

Semantic operators come from orbits: ``acl_n(A)`` is the union of the
A-orbits with at most ``n`` elements (``n = 1`` gives ``dcl``).  On a finite
structure every orbit is finite, so the unbounded ``acl`` is the whole
universe; the bounded operators carry the information.

Syntactic operators are built from a list of parameterized formulas Δ: one
step collects the solution sets of instances ``phi(x, a)`` with ``a`` drawn
from A whose size lies in ``1..n``.  Iterating the step to a fixpoint
realizes the transitive closure of Δ on the fixed structure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Iterable, Sequence

from .automorphisms import orbits
from .logic import ParamFormula, solutions, parse_param_formula
from .structure import Structure

EXHAUSTIVE_LIMIT = 14


class ClosureError(ValueError):
    pass


@dataclass(frozen=True)
class ClosureOperator:
    """A named closure operator with its provenance.

    ``kind`` is ``"semantic"`` (orbits), ``"delta"`` (witnessed by the
    formulas in ``delta``), ``"meet"`` or ``"join"`` (built from ``parts``).
    ``bound`` is the solution-count bound n, ``None`` meaning unbounded.
    """
    name: str
    kind: str = "delta"
    bound: int | None = None
    delta: tuple[ParamFormula, ...] = ()
    iterate: bool = True
    parts: tuple["ClosureOperator", ...] = field(default=(), compare=True)

    def __call__(self, s: Structure, a: Iterable[int]) -> frozenset:
        return apply_operator(s, self, frozenset(a))

    def describe(self) -> str:
        b = "unbounded" if self.bound is None else f"n={self.bound}"
        if self.kind == "semantic":
            return f"semantic acl, {b}"
        if self.kind == "delta":
            names = ",".join(pf.name for pf in self.delta)
            return f"delta{{{names}}}, {b}{', iterated' if self.iterate else ''}"
        return f"{self.kind}({', '.join(p.name for p in self.parts)}), {b}"


IDENTITY = parse_param_formula("def id(x; y) = x = y")


def semantic_operator(bound: int | None = None, name: str | None = None) -> ClosureOperator:
    if name is None:
        name = "acl" if bound is None else ("dcl" if bound == 1 else f"acl_{bound}")
    return ClosureOperator(name, "semantic", bound)


def delta_operator(delta: Sequence[ParamFormula], bound: int | None = None,
                   iterate: bool = True, name: str = "delta") -> ClosureOperator:
    return ClosureOperator(name, "delta", bound, dedupe_delta(delta), iterate)


def bottom_operator(bound: int | None = None, name: str = "bottom") -> ClosureOperator:
    """The operator witnessed by ``x = y`` alone: ``A -> A``."""
    return delta_operator([IDENTITY], bound, True, name)


def dedupe_delta(delta: Iterable[ParamFormula]) -> tuple[ParamFormula, ...]:
    """Drop repeated formulas (same parameters and body), keeping first occurrences."""
    seen, out = set(), []
    for pf in delta:
        key = (pf.solution_var, pf.param_vars, pf.body)
        if key not in seen:
            seen.add(key)
            out.append(pf)
    return tuple(out)


def _check_subset(s: Structure, a) -> frozenset:
    a = frozenset(a)
    bad = [e for e in a if not (isinstance(e, int) and 0 <= e < s.size)]
    if bad:
        raise ClosureError(f"elements {sorted(bad)} are outside the universe of size {s.size}")
    return a


# -- semantic -------------------------------------------------------------------

def acl_semantic(s: Structure, a: Iterable[int], n: int | None = None) -> frozenset:
    """Union of the A-orbits with at most ``n`` elements.

    ``n=None`` is the unbounded operator (the universe, as all orbits of a
    finite structure are finite); ``n=1`` is ``dcl``; ``n=0`` returns A.
    """
    a = _check_subset(s, a)
    if n is None:
        return frozenset(range(s.size))
    if n == 0:
        return a
    return frozenset().union(*(b for b in orbits(s, a).blocks if len(b) <= n))


def dcl_semantic(s: Structure, a: Iterable[int]) -> frozenset:
    return acl_semantic(s, a, 1)


# -- syntactic ------------------------------------------------------------------

@lru_cache(maxsize=1 << 18)
def _solutions(s: Structure, pf: ParamFormula, params: tuple) -> frozenset:
    return solutions(s, pf, params)


def witnessed_sets(s: Structure, delta: Sequence[ParamFormula], a: Iterable[int],
                   n: int | None = None) -> frozenset:
    """Solution sets of the instances ``phi(x, a)``, ``phi`` in Δ and ``a`` a tuple
    over A (repetitions allowed), with between 1 and ``n`` solutions."""
    a = sorted(a)
    out = set()
    for pf in delta:
        for params in product(a, repeat=pf.arity):
            sol = _solutions(s, pf, params)
            if sol and (n is None or len(sol) <= n):
                out.add(sol)
    return frozenset(out)


def delta_step(s: Structure, delta: Sequence[ParamFormula], a: Iterable[int],
               n: int | None = None) -> frozenset:
    return frozenset().union(*witnessed_sets(s, delta, a, n))


def acl_delta(s: Structure, delta: Sequence[ParamFormula], a: Iterable[int],
              n: int | None = None, iterate: bool = False) -> frozenset:
    """Δ-algebraic closure with solution bound ``n`` (``None``: any finite number).

    With ``iterate`` the step is repeated, accumulating, until nothing new
    appears.
    """
    a = _check_subset(s, a)
    out = delta_step(s, delta, a, n)
    if iterate:
        while True:
            nxt = out | delta_step(s, delta, out, n)
            if nxt == out:
                break
            out = nxt
    return out


def iterate_steps(s: Structure, delta: Sequence[ParamFormula], a: Iterable[int],
                  n: int | None, steps: int) -> frozenset:
    """``steps``-fold composition of the one-step operator."""
    out = _check_subset(s, a)
    for _ in range(steps):
        out = delta_step(s, delta, out, n)
    return out


# -- general operators --------------------------------------------------------------

def operator_witnesses(s: Structure, op: ClosureOperator, x: frozenset):
    """Family of sets that ``op`` adds in one step from ``x``.

    Semantic operators return ``None``: their family is "every x-invariant
    set with at most ``bound`` elements", which is handled by membership
    tests rather than listed.
    """
    if op.kind == "semantic":
        return None
    if op.kind == "delta":
        return witnessed_sets(s, op.delta, x, op.bound)
    fams = [operator_witnesses(s, p, x) for p in op.parts]
    if op.kind == "join":
        if any(f is None for f in fams):
            raise ClosureError("witness family of a join with a semantic operator is not enumerable")
        return frozenset().union(*fams)
    # meet
    explicit = [f for f in fams if f is not None]
    semantic = [p for p, f in zip(op.parts, fams) if f is None]
    if not explicit:
        raise ClosureError("meet of semantic operators has no explicit witness family")
    common = frozenset.intersection(*explicit)
    for p in semantic:
        common = frozenset(w for w in common if _is_invariant_within(s, x, w, p.bound))
    return common


def _is_invariant_within(s, x, w, bound):
    if bound is not None and len(w) > bound:
        return False
    return all(b <= w or not (b & w) for b in orbits(s, x).blocks)


@lru_cache(maxsize=1 << 18)
def _apply(s: Structure, op: ClosureOperator, a: frozenset) -> frozenset:
    if op.kind == "semantic":
        return acl_semantic(s, a, op.bound)
    if op.kind == "delta":
        return acl_delta(s, op.delta, a, op.bound, op.iterate)
    if op.kind == "join":
        out = a
        while True:
            nxt = out
            for p in op.parts:
                nxt = nxt | _apply(s, p, nxt)
            if nxt == out:
                return out
            out = nxt
    if op.kind == "meet":
        out = a
        while True:
            nxt = out.union(*operator_witnesses(s, op, out))
            if nxt == out:
                return out
            out = nxt
    raise ClosureError(f"unknown operator kind {op.kind!r}")


def apply_operator(s: Structure, op: ClosureOperator, a: Iterable[int]) -> frozenset:
    return _apply(s, op, _check_subset(s, a))


def one_step(op: ClosureOperator) -> ClosureOperator:
    """The non-iterated version of a Δ-operator."""
    if op.kind != "delta":
        return op
    return ClosureOperator(op.name, "delta", op.bound, op.delta, False)


# -- degrees ---------------------------------------------------------------------

def orbit_degree(s: Structure, a: Iterable[int], e: int) -> int:
    """Size of the A-orbit of ``e`` (the degree of ``e`` over A)."""
    return len(orbits(s, _check_subset(s, a)).block_of(e))


def deg_acl_of_set(s: Structure, a: Iterable[int]) -> int:
    """Least n with ``acl_n(A) = acl(A)``: the largest A-orbit size."""
    return max(len(b) for b in orbits(s, _check_subset(s, a)).blocks)


@dataclass
class DegreeReport:
    per_set: dict
    structure_degree: int
    witness: frozenset
    stabilization_index: int
    exhaustive: bool
    max_subset_size: int


def subsets_up_to(n: int, k: int) -> Iterable[frozenset]:
    """Subsets of ``range(n)`` of size at most ``k``, by size then lexicographically."""
    for r in range(min(k, n) + 1):
        for c in combinations(range(n), r):
            yield frozenset(c)


def sample_subsets(n: int, k: int, limit: int = 2000, seed: int = 0) -> list[frozenset]:
    """Every subset of size at most ``min(k, 3)`` plus a seeded sample of
    larger ones, deduplicated, in deterministic order."""
    out = list(subsets_up_to(n, min(k, 3)))
    seen = set(out)
    rng = random.Random(seed)
    tries = 0
    while len(out) < limit and tries < 20 * limit and k > 3:
        tries += 1
        r = rng.randint(4, min(k, n))
        c = frozenset(rng.sample(range(n), r))
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def deg_acl_of_structure(s: Structure, max_subset_size: int, limit: int = 5000,
                         seed: int = 0) -> DegreeReport:
    """Maximum of ``deg_acl_of_set`` over sets with at most ``max_subset_size``
    elements.

    Enumeration is exhaustive when N is at most 14 or when the number of
    such sets does not exceed ``limit``; otherwise all sets of size at most
    3 plus a seeded sample are used and ``exhaustive`` is False.
    """
    if max_subset_size > s.size:
        raise ClosureError(f"max_subset_size {max_subset_size} exceeds universe size {s.size}")
    total = sum(comb(s.size, r) for r in range(max_subset_size + 1))
    exhaustive = s.size <= EXHAUSTIVE_LIMIT or total <= limit
    domain = (subsets_up_to(s.size, max_subset_size) if exhaustive
              else sample_subsets(s.size, max_subset_size, limit, seed))
    per_set = {}
    best, witness = 0, frozenset()
    for a in domain:
        d = deg_acl_of_set(s, a)
        per_set[a] = d
        if d > best:
            best, witness = d, a
    # chains stabilize exactly at the degree, except at the universe itself
    stab = max(closure_chain(s, a).stabilization_index for a in per_set)
    return DegreeReport(per_set, best, witness, stab, exhaustive, max_subset_size)


def _all_orbits_trivial(s, a):
    return all(len(b) == 1 for b in orbits(s, a).blocks)


def acl_dcl_difference(s: Structure):
    """Least n such that every set with at least n elements has only
    singleton orbits (so dcl = acl on it), within this one model.

    Sets containing a good set are good (the stabilizer only shrinks), so it
    suffices to find the first size at which all sets are good.  Returns the
    string ``"none-up-to-N"`` if no size up to N qualifies.
    """
    for n in range(s.size + 1):
        if all(_all_orbits_trivial(s, frozenset(c)) for c in combinations(range(s.size), n)):
            return n
    return "none-up-to-N"


@dataclass
class ClosureChain:
    sets: list
    stabilization_index: int


def closure_chain(s: Structure, a: Iterable[int]) -> ClosureChain:
    """``[acl_0(A) = A, acl_1(A), ...]`` up to the first n with ``acl_n(A) = acl(A)``."""
    a = _check_subset(s, a)
    top = acl_semantic(s, a, None)
    chain = [a]
    n = 0
    while chain[-1] != top:
        n += 1
        chain.append(acl_semantic(s, a, n))
    return ClosureChain(chain, n)
