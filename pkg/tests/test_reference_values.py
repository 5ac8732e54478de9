"""Exact values on the small reference structures, operation by operation."""

import pytest

from algclosure.algsets import DEG_alg_u, deg_alg_u, enumerate_algebraic_sets, is_A_algebraic
from algclosure.automorphisms import is_rigid, orbits, stabilizer_group
from algclosure.closure import (IDENTITY, acl_dcl_difference, acl_delta, acl_semantic, apply_operator,
                                bottom_operator, closure_chain, deg_acl_of_set, deg_acl_of_structure,
                                delta_operator, semantic_operator)
from algclosure.lattice import (build_poset, compose_delta, export_hasse_dot, join, lattice_stats, meet,
                                operators_equivalent, poset_from_operators)
from algclosure.logic import (And, Atom, CountExists, Equal, Not, canonical, evaluate, parse_formula,
                              parse_param_formula, solutions)
from algclosure.pregeometry import (canonical_geometry, check_axioms, check_regular_delta,
                                    report_by_axiom)
from algclosure.structure import (Signature, Structure, colored_hypergraph_tree, complete_bipartite,
                                  cyclic_order, equivalence, linear_order, validate_structure)

from conftest import hyper_deltas, k2


@pytest.fixture(scope="module")
def hyper():
    s = colored_hypergraph_tree(3, 2, 1)
    return s, hyper_deltas(s)


def classes(s, rel):
    return sorted({tuple(sorted(b for a2, b in s.relations[rel] if a2 == a)) for a in range(s.size)})


def test_structures():
    assert k2().size == 2
    assert validate_structure(k2()) == []
    bad = Structure(Signature((("E", 2),), ("c",)), 2, {"E": frozenset(), "F": frozenset()}, {"c": 2})
    assert len(validate_structure(bad)) == 2
    assert classes(equivalence([2, 2, 2]), "E") == [(0, 1), (2, 3), (4, 5)]
    s = colored_hypergraph_tree(3, 2, 1)
    assert s.size == 9
    assert [c for c in classes(s, "E1") if len(c) > 1] == [(0, 1, 2)]
    assert [c for c in classes(s, "E2") if len(c) > 1] == [(0, 3, 4), (1, 5, 6), (2, 7, 8)]
    rotations = [tuple((i + r) % 5 for i in range(5)) for r in range(5)]
    assert stabilizer_group(cyclic_order(5)) == sorted(rotations)


def test_formulas():
    assert parse_formula("E(x,y) & !(x = y)") == And(Atom("E", ("x", "y")), Not(Equal("x", "y")))
    assert parse_formula("exists[=2] z. E(x,z)") == CountExists("=", 2, "z", Atom("E", ("x", "z")))
    assert evaluate(k2(), Atom("E", ("x", "y")), {"x": 0, "y": 1})
    assert evaluate(k2(), parse_formula("exists[=1] z. E(x,z)"), {"x": 0})
    assert not evaluate(equivalence([2, 2, 2]), parse_formula("exists[>=3] z. E(x,z)"), {"x": 0})


def test_solution_sets(hyper):
    s, (d1, _) = hyper
    assert solutions(s, d1[1], (0,)) == {1, 2}
    assert all(solutions(s, IDENTITY, (a,)) == {a} for a in range(s.size))
    e = equivalence([2, 2, 2])
    assert solutions(e, parse_param_formula("def cls(x; y) = E(x, y)"), (2,)) == {2, 3}


def test_groups_and_orbits():
    assert stabilizer_group(k2()) == [(0, 1), (1, 0)]
    assert stabilizer_group(linear_order(4)) == [(0, 1, 2, 3)]
    assert stabilizer_group(cyclic_order(5), {0}) == [(0, 1, 2, 3, 4)]
    assert orbits(equivalence([2, 2, 2]), {0}).blocks == (frozenset({0}), frozenset({1}),
                                                          frozenset({2, 3, 4, 5}))
    assert orbits(k2()).blocks == (frozenset({0, 1}),)
    assert orbits(complete_bipartite(2, 3, 2)).sizes() == [4, 6]
    assert is_rigid(linear_order(4)) and not is_rigid(k2()) and not is_rigid(cyclic_order(5))


def test_closures(hyper):
    s, (d1, d2) = hyper
    assert acl_semantic(k2(), (), 1) == frozenset() and acl_semantic(k2(), (), 2) == {0, 1}
    assert acl_semantic(equivalence([2, 2, 2]), {0}, 2) == {0, 1}
    assert acl_delta(s, d1, {0}, 2, iterate=True) == {0, 1, 2}
    assert acl_delta(s, d2, {0}, 2, iterate=True) == {0, 3, 4}
    assert acl_delta(s, [IDENTITY], {3, 5}, 1) == {3, 5}


def test_degrees():
    assert deg_acl_of_set(k2(), ()) == 2
    assert deg_acl_of_set(linear_order(4), ()) == 1
    # fixing one point of each 2-class fixes its mate too
    assert deg_acl_of_set(equivalence([2, 2, 2]), {0, 2, 4}) == 1
    assert deg_acl_of_set(equivalence([2, 2, 2]), {0, 2}) == 2
    assert deg_acl_of_structure(k2(), 2).structure_degree == 2
    assert deg_acl_of_structure(equivalence([3, 3, 3]), 1).structure_degree == 9
    rep = deg_acl_of_structure(cyclic_order(5), 1)
    assert rep.structure_degree == 5 and rep.per_set[frozenset({3})] == 1
    assert acl_dcl_difference(linear_order(4)) == 0
    assert acl_dcl_difference(cyclic_order(5)) == 1
    assert acl_dcl_difference(k2()) == 1


def test_chains():
    ch = closure_chain(k2(), ())
    assert ch.sets == [frozenset(), frozenset(), frozenset({0, 1})] and ch.stabilization_index == 2
    ch = closure_chain(equivalence([2, 2, 2]), {0})
    assert ch.sets[1] == ch.sets[2] == ch.sets[3] == {0, 1}
    assert ch.sets[4] == frozenset(range(6)) and ch.stabilization_index == 4
    assert closure_chain(k2(), {0, 1}).sets == [frozenset({0, 1})]


def test_algebraic_sets():
    e = equivalence([3, 3, 3])
    rep = is_A_algebraic(e, {0}, {1, 2})
    assert rep.is_invariant and rep.orbit_decomposition == [frozenset({1, 2})]
    assert not is_A_algebraic(e, {0}, {1}).is_invariant
    assert deg_alg_u(e, {0}, ()) == 0
    assert enumerate_algebraic_sets(k2(), (), 2) == [frozenset(), frozenset({0, 1})]
    assert enumerate_algebraic_sets(k2(), {0, 1}, 1) == [frozenset(), {0}, {1}]
    assert deg_alg_u(e, {0}, {0, 1, 2}) == 2
    assert deg_alg_u(e, {0, 3}, {0, 3}) == 1
    assert DEG_alg_u(e, {0}, 2) == 2
    assert DEG_alg_u(e, range(9)) == 1
    assert DEG_alg_u(k2(), (), 2) == 2


def test_axioms_and_geometry(hyper):
    s, (d1, d2) = hyper
    ex = report_by_axiom(check_axioms(complete_bipartite(2, 3, 2), semantic_operator(2)))["exchange"]
    assert ex.counterexample == {"X": frozenset(), "a": 0, "b": 2}
    tr = report_by_axiom(check_axioms(s, delta_operator(d1 + d2[1:], 2, iterate=False)))["transitivity"]
    assert not tr.holds and tr.counterexample["X"] == {0}
    ident = report_by_axiom(check_axioms(k2(), delta_operator([IDENTITY], 1, iterate=False)))
    assert all(ident[a].holds for a in ("reflexivity", "transitivity", "es-property"))

    geo = canonical_geometry(equivalence([2, 2, 2]), semantic_operator(2))
    assert geo.points == [frozenset({0, 1}), frozenset({2, 3}), frozenset({4, 5})]
    assert geo.closure_map[frozenset()] == frozenset() and geo.es_property
    assert canonical_geometry(cyclic_order(5), delta_operator([IDENTITY], 1)).points == \
        [frozenset({a}) for a in range(5)]
    assert canonical_geometry(k2(), semantic_operator(2)).points == []

    assert check_regular_delta(k2(), [IDENTITY], 1).regular
    assert check_regular_delta(s, d1, 2).regular
    assert not check_regular_delta(s, d1 + d2[1:], 2).acl_transitive


def test_equivalence_of_delta_sets(hyper):
    s, (d1, d2) = hyper
    tauto = parse_param_formula("def tauto(x; y) = x = y & y = y")
    assert operators_equivalent(k2(), [IDENTITY], [IDENTITY, tauto], 1)
    assert not operators_equivalent(s, d1, d2, 2)
    assert operators_equivalent(s, d1, d1 + [d1[1]], 2)


def test_composition(hyper):
    s, (d1, _) = hyper
    chained = canonical(parse_param_formula(
        "def c(x; y) = exists x1. (E1(x, x1) & !(x = x1)) & (E1(x1, y) & !(x1 = y))"))
    keys = {(c.param_vars, c.body) for c in map(canonical, compose_delta(d1, 1))}
    assert (chained.param_vars, chained.body) in keys
    assert compose_delta(d1, 0) == d1


def test_meets_and_joins(hyper):
    s, (d1, d2) = hyper
    op1, op2 = delta_operator(d1, 2, name="d1"), delta_operator(d2, 2, name="d2")
    bottom = bottom_operator(2)
    dom = [frozenset(c) for c in ((), (0,), (0, 3), (1, 5, 8))]
    same = lambda p, q: all(apply_operator(s, p, a) == apply_operator(s, q, a) for a in dom)
    assert same(meet(s, op1, op2), delta_operator([IDENTITY], 2))
    assert same(meet(s, op1, op1), op1)
    assert same(meet(s, op1, bottom), bottom)
    u1, u2 = delta_operator(d1, None, name="d1"), delta_operator(d2, None, name="d2")
    assert join(s, u1, u2)(s, {0}) == frozenset(range(9))
    assert join(s, op1, op2) is None
    assert same(join(s, op1, bottom), op1)


def test_posets(hyper):
    s, (d1, d2) = hyper
    p = build_poset(s, [("d0", [IDENTITY]), ("d1", d1), ("d2", d2)], "semilattice", 2)
    st = lattice_stats(p)
    assert (len(p), st.least, st.greatest, st.height, st.width) == (3, "d0", None, 2, 2)
    dot = export_hasse_dot(p)
    assert dot.count("[label=") == 3 and dot.count("->") == 2
    single = lattice_stats(poset_from_operators(s, [bottom_operator(2)]))
    assert (single.height, single.width) == (1, 1)
