"""Checking the pregeometry axioms for closure operators on a finite structure,
building the canonical geometry of a regular operator, and deciding
regularity of Δ-operators.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .closure import (ClosureOperator, _solutions, apply_operator, delta_operator,
                      subsets_up_to)
from .logic import ParamFormula
from .structure import Structure

SUBSET_CAP = 14
AXIOMS = ("reflexivity", "transitivity", "finite-character", "exchange", "es-property")


class GeometryError(ValueError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


def evaluation_domain(n: int, subset_cap: int = SUBSET_CAP, sample: int = 64,
                      seed: int = 0) -> tuple[list[frozenset], bool]:
    """Subsets on which operators are compared or axioms checked.

    All ``2**n`` subsets when ``n <= subset_cap``; otherwise all subsets of
    size at most 3 plus ``sample`` seeded random larger subsets.  The flag
    says whether the domain is exhaustive.
    """
    if n <= subset_cap:
        return list(subsets_up_to(n, n)), True
    base = list(subsets_up_to(n, 3))
    seen, extra = set(base), []
    rng = random.Random(seed)
    for _ in range(100 * sample):
        if len(extra) >= sample:
            break
        c = frozenset(rng.sample(range(n), rng.randint(4, n)))
        if c not in seen:
            seen.add(c)
            extra.append(c)
    return base + extra, False


@dataclass
class AxiomReport:
    axiom: str
    holds: bool
    counterexample: dict | None = None
    subsets_checked: int = 0
    exhaustive: bool = True
    detail: dict = field(default_factory=dict)


def _witness_bound(s: Structure, op: ClosureOperator) -> int:
    if op.kind == "delta" and not op.iterate:
        return max((pf.arity for pf in op.delta), default=0)
    return s.size


def check_axioms(s: Structure, op: ClosureOperator, subset_cap: int = SUBSET_CAP,
                 sample: int = 64, seed: int = 0) -> list[AxiomReport]:
    """One report per axiom, in the order reflexivity, transitivity, finite
    character, exchange, ES-property.  Each failing report carries the first
    counterexample found (domain order, then ascending b, then ascending a).
    """
    domain, exhaustive = evaluation_domain(s.size, subset_cap, sample, seed)
    cache = {}

    def cl(x):
        x = frozenset(x)
        if x not in cache:
            cache[x] = apply_operator(s, op, x)
        return cache[x]

    reports = []

    bad = next((x for x in domain if not x <= cl(x)), None)
    reports.append(AxiomReport("reflexivity", bad is None,
                               None if bad is None else {"X": bad, "missing": x_minus(bad, cl(bad))},
                               len(domain), exhaustive))

    bad = next((x for x in domain if cl(cl(x)) != cl(x)), None)
    reports.append(AxiomReport("transitivity", bad is None,
                               None if bad is None else {"X": bad, "cl(X)": cl(bad), "cl(cl(X))": cl(cl(bad))},
                               len(domain), exhaustive))

    bound = _witness_bound(s, op)
    fc_bad, worst = None, 0
    for x in domain:
        todo = set(cl(x))
        k = 0
        while todo and k <= min(bound, len(x)):
            for x0 in combinations(sorted(x), k):
                todo -= cl(x0)
                if not todo:
                    break
            if todo:
                k += 1
        if todo:
            fc_bad = {"X": x, "a": min(todo), "bound": bound}
            break
        worst = max(worst, k)
    reports.append(AxiomReport("finite-character", fc_bad is None, fc_bad, len(domain), exhaustive,
                               {"max_witness_size": worst, "bound": bound}))

    ex_bad = None
    for x in domain:
        cx = cl(x)
        for b in range(s.size):
            if b in x:
                continue
            for a in sorted(cl(x | {b}) - cx):
                if b not in cl(x | {a}):
                    ex_bad = {"X": x, "a": a, "b": b}
                    break
            if ex_bad:
                break
        if ex_bad:
            break
    reports.append(AxiomReport("exchange", ex_bad is None, ex_bad, len(domain), exhaustive))

    es_bad = None
    if cl(frozenset()):
        es_bad = {"X": frozenset(), "cl(X)": cl(frozenset())}
    else:
        for a in range(s.size):
            if cl({a}) != {a}:
                es_bad = {"X": frozenset({a}), "cl(X)": cl({a})}
                break
    reports.append(AxiomReport("es-property", es_bad is None, es_bad, s.size + 1, True))
    return reports


def x_minus(x, y):
    return frozenset(x) - frozenset(y)


def revalidate(s: Structure, op: ClosureOperator, report: AxiomReport) -> bool:
    """Re-evaluate the operator on a counterexample and confirm the violation."""
    ce = report.counterexample
    if ce is None:
        return False
    cl = lambda x: apply_operator(s, op, frozenset(x))
    x = ce["X"]
    if report.axiom == "reflexivity":
        return not x <= cl(x)
    if report.axiom == "transitivity":
        return cl(cl(x)) != cl(x)
    if report.axiom == "finite-character":
        a, bound = ce["a"], ce["bound"]
        return a in cl(x) and all(a not in cl(x0) for k in range(min(bound, len(x)) + 1)
                                  for x0 in combinations(sorted(x), k))
    if report.axiom == "exchange":
        a, b = ce["a"], ce["b"]
        return a in cl(x | {b}) and a not in cl(x) and b not in cl(x | {a})
    if report.axiom == "es-property":
        return cl(x) != x
    raise ValueError(report.axiom)


def report_by_axiom(reports: Sequence[AxiomReport]) -> dict[str, AxiomReport]:
    return {r.axiom: r for r in reports}


# -- canonical geometry ----------------------------------------------------------

@dataclass
class GeometryQuotient:
    points: list
    closure_map: dict
    es_property: bool


def canonical_geometry(s: Structure, op: ClosureOperator, subset_cap: int = SUBSET_CAP,
                       max_points: int = 16) -> GeometryQuotient:
    """Quotient of a regular operator by closures of singletons.

    Points are the distinct sets ``cl({a})`` for ``a`` outside ``cl(∅)``,
    ordered by their sorted elements.  ``closure_map`` sends each set of point
    indices P to the indices of the points ``cl({b})`` for ``b`` in the
    closure of the union of P, outside ``cl(∅)``.
    """
    reports = report_by_axiom(check_axioms(s, op, subset_cap))
    for ax in ("reflexivity", "transitivity"):
        if not reports[ax].holds:
            raise GeometryError(f"operator not regular: {ax} fails", reports[ax])
    cl = lambda x: apply_operator(s, op, frozenset(x))
    base = cl(())
    points = sorted({cl({a}) for a in range(s.size) if a not in base}, key=sorted)
    if len(points) > max_points:
        raise GeometryError(f"{len(points)} points exceed the cap of {max_points}")
    cmap = {}
    for r in range(len(points) + 1):
        for combo in combinations(range(len(points)), r):
            union = frozenset().union(*(points[i] for i in combo))
            closed = cl(union)
            cmap[frozenset(combo)] = frozenset(i for i, p in enumerate(points)
                                               if any(cl({b}) == p for b in closed - base))
    es = cmap[frozenset()] == frozenset() and all(
        cmap[frozenset({i})] == frozenset({i}) for i in range(len(points)))
    return GeometryQuotient(points, cmap, es)


# -- regularity of Δ ---------------------------------------------------------------

@dataclass
class RegularityReport:
    acl_reflexive: bool
    acl_transitive: bool
    witnesses: dict

    @property
    def regular(self) -> bool:
        return self.acl_reflexive and self.acl_transitive


def check_regular_delta(s: Structure, delta: Sequence[ParamFormula], n: int | None,
                        subset_cap: int = SUBSET_CAP) -> RegularityReport:
    """Reflexivity: every element ``a`` satisfies some ``phi(a, a..a)`` with
    between 1 and ``n`` solutions.  Transitivity: applying the one-step
    operator twice adds nothing, on every subset of the evaluation domain.
    """
    witnesses = {}
    unreflexive = None
    for a in range(s.size):
        hit = None
        for pf in delta:
            sol = _solutions(s, pf, (a,) * pf.arity)
            if a in sol and (n is None or len(sol) <= n):
                hit = pf.name
                break
        if hit is None:
            unreflexive = a
            break
        witnesses.setdefault("reflexive_by", {})[a] = hit
    if unreflexive is not None:
        witnesses["not_reflexive_at"] = unreflexive
    op = delta_operator(delta, n, iterate=False)
    domain, _ = evaluation_domain(s.size, subset_cap)
    bad = None
    for x in domain:
        once = apply_operator(s, op, x)
        twice = apply_operator(s, op, once)
        if not twice <= once:
            bad = {"X": x, "once": once, "twice": twice}
            break
    if bad:
        witnesses["not_transitive_at"] = bad
    return RegularityReport(unreflexive is None, bad is None, witnesses)


def is_regular_operator(s: Structure, op: ClosureOperator, subset_cap: int = SUBSET_CAP) -> bool:
    """Reflexive and transitive on the evaluation domain."""
    domain, _ = evaluation_domain(s.size, subset_cap)
    for x in domain:
        c = apply_operator(s, op, x)
        if not x <= c or apply_operator(s, op, c) != c:
            return False
    return True
