"""Algebraic sets over a parameter set A and their degrees.

In a finite structure every A-invariant set is the solution set of a formula
with parameters from A, so "B is A-algebraic" is decided by checking that B
is a union of A-orbits.  Unions of algebraic sets are again invariant, so
the A-algebraic and (A,u)-algebraic families coincide here; both names refer
to the same computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .automorphisms import orbits
from .closure import _check_subset, _solutions
from .logic import ParamFormula


@dataclass
class AlgebraicSetReport:
    base: frozenset
    target: frozenset
    is_invariant: bool
    orbit_decomposition: list
    deg_alg_u: int | None
    witness: tuple[ParamFormula, tuple] | None = None


def _decompose(s, a, b):
    blocks = orbits(s, a).blocks
    inside = [blk for blk in blocks if blk <= b]
    if frozenset().union(*inside) == b:
        return inside
    return None


def is_A_algebraic(s, a: Iterable[int], b: Iterable[int],
                   delta: Sequence[ParamFormula] | None = None) -> AlgebraicSetReport:
    """Decide whether B is algebraic over A.

    Without ``delta`` the answer is semantic (B is a union of A-orbits).
    With ``delta`` the report also carries the first instance ``(phi, params)``
    whose solution set is exactly B, or ``None`` if Δ has no such instance.
    """
    a, b = _check_subset(s, a), _check_subset(s, b)
    parts = _decompose(s, a, b)
    report = AlgebraicSetReport(a, b, parts is not None, parts or [],
                                max((len(p) for p in parts), default=0) if parts is not None else None)
    if delta is not None:
        for pf in delta:
            for params in product(sorted(a), repeat=pf.arity):
                if _solutions(s, pf, params) == b:
                    report.witness = (pf, params)
                    return report
    return report


def enumerate_algebraic_sets(s, a: Iterable[int], max_size: int) -> list[frozenset]:
    """All A-invariant sets with at most ``max_size`` elements, by size and
    then lexicographically."""
    a = _check_subset(s, a)
    blocks = [blk for blk in orbits(s, a).blocks if len(blk) <= max_size]
    found = []

    def grow(i, acc, size):
        if i == len(blocks):
            found.append(acc)
            return
        grow(i + 1, acc, size)
        if size + len(blocks[i]) <= max_size:
            grow(i + 1, acc | blocks[i], size + len(blocks[i]))

    grow(0, frozenset(), 0)
    return sorted(found, key=lambda x: (len(x), sorted(x)))


def deg_alg_u(s, a: Iterable[int], b: Iterable[int]) -> int | None:
    """Least n such that B is a union of A-algebraic sets of size at most n:
    the largest A-orbit inside B.  ``None`` if B is not A-invariant."""
    return is_A_algebraic(s, a, b).deg_alg_u


def DEG_alg_u(s, a: Iterable[int], scope_bound: int | None = None) -> int:
    """Largest A-orbit size among the orbits counted as finite, that is, the
    orbits with at most ``scope_bound`` elements (default: all)."""
    a = _check_subset(s, a)
    bound = s.size if scope_bound is None else scope_bound
    return max((len(blk) for blk in orbits(s, a).blocks if len(blk) <= bound), default=0)


def algebraic_part(s, a: Iterable[int], scope_bound: int | None = None) -> frozenset:
    """Union of the A-orbits with at most ``scope_bound`` elements."""
    a = _check_subset(s, a)
    bound = s.size if scope_bound is None else scope_bound
    return frozenset().union(*(blk for blk in orbits(s, a).blocks if len(blk) <= bound))


def in_family(s, a, b, n: int | None = None) -> bool:
    """Membership of B in the (A,u,n)-algebraic sets; ``n=None`` drops the
    bound.  Since A-algebraic means A-invariant here, the (A,n)-algebraic
    family is the same set of sets.
    """
    d = deg_alg_u(s, a, b)
    if d is None:
        return False
    return n is None or d <= n
