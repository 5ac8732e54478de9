import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from algclosure.closure import (IDENTITY, apply_operator, delta_operator, iterate_steps,
                                semantic_operator, subsets_up_to)
from algclosure.lattice import (LatticeError, boolean_closure, boolean_lattice, build_poset,
                                compose_delta, export_hasse_dot, isomorphic, join, lattice_stats,
                                meet, operators_equivalent, poset_from_operators)
from algclosure.logic import parse_param_formula, solutions
from algclosure.pregeometry import is_regular_operator
from algclosure.structure import colored_hypergraph_tree, equivalence

from conftest import hyper_deltas
from strategies import small_structures


@pytest.fixture(scope="module")
def hyper():
    s = colored_hypergraph_tree(3, 2, 1)
    return s, hyper_deltas(s)


def test_compose_sizes(hyper):
    s, (d1, d2) = hyper
    union = d1 + d2[1:]
    assert [len(compose_delta(union, d)) for d in range(4)] == [3, 12, 39, 120]
    assert compose_delta(union, 0) == union


def test_compose_depth_validation(hyper):
    _, (d1, _) = hyper
    with pytest.raises(LatticeError):
        compose_delta(d1, -1)
    with pytest.raises(LatticeError, match="nodes"):
        compose_delta(d1, 2, max_nodes=5)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_compose_matches_iteration_on_random_structures(data):
    s = data.draw(small_structures(max_size=5, max_relations=1))
    rel, k = s.signature.relations[0]
    if k != 2:
        return
    adj = parse_param_formula(f"def adj(x; y) = {rel}(y, x)", s.signature)
    delta = [IDENTITY, adj]
    for d in range(3):
        one = delta_operator(compose_delta(delta, d), None, iterate=False)
        for a in subsets_up_to(s.size, 2):
            assert apply_operator(s, one, a) == iterate_steps(s, delta, a, None, d + 1)


def test_boolean_closure_k1_is_literals():
    s = equivalence([2, 2])
    cls = parse_param_formula("def cls(x; y) = E(x, y)", s.signature)
    lits = boolean_closure([IDENTITY, cls], 1)
    assert [pf.name for pf in lits] == ["id", "cls", "not_id", "not_cls"]
    neg = lits[3]
    assert solutions(s, neg, (0,)) == {2, 3}


def test_boolean_closure_keeps_parameter_blocks_apart():
    s = equivalence([2, 2, 2])
    cls = parse_param_formula("def cls(x; y) = E(x, y)", s.signature)
    lits = boolean_closure([cls], 2)
    both = next(pf for pf in lits if pf.name == "not_cls_and_not_cls")
    assert both.arity == 2
    assert solutions(s, both, (0, 2)) == {4, 5}


def test_meet_join_of_hypergraph_seeds(hyper):
    s, (d1, d2) = hyper
    op1, op2 = delta_operator(d1, 2, name="d1"), delta_operator(d2, 2, name="d2")
    m = meet(s, op1, op2)
    assert m(s, {0}) == {0}
    assert is_regular_operator(s, m)
    assert join(s, op1, op2) is None
    top = semantic_operator(None)
    assert join(s, op1, top) is top
    u1, u2 = delta_operator(d1, None, name="d1"), delta_operator(d2, None, name="d2")
    assert join(s, u1, u2)(s, {0}) == frozenset(range(9))


def test_meet_rejects_non_regular(hyper):
    s, (d1, d2) = hyper
    bad = delta_operator(d1 + d2[1:], 2, iterate=False, name="bad")
    with pytest.raises(LatticeError, match="not regular"):
        meet(s, bad, delta_operator(d1, 2))


def test_build_poset_rejects_non_regular_seed(hyper):
    s, (d1, d2) = hyper
    with pytest.raises(LatticeError, match="not regular"):
        build_poset(s, [("bad", d1[1:])], "semilattice", 2)


def test_unbounded_lattice_of_two_colours(hyper):
    s, (d1, d2) = hyper
    p = build_poset(s, [("d1", d1), ("d2", d2)], "lattice", None)
    assert len(p) == 4
    assert isomorphic(p.leq, boolean_lattice(2))
    st_ = lattice_stats(p)
    assert st_.distributive and st_.height == 3 and st_.width == 2
    # computed meets coincide with order-theoretic greatest lower bounds
    for i in range(len(p)):
        for j in range(len(p)):
            m = meet(s, p.elements[i], p.elements[j], check=False)
            assert p.find(s, m) == p.meets[i, j]
    # the unbounded semantic closure dominates every element
    acl = semantic_operator(None)
    for op in p.elements:
        assert all(apply_operator(s, op, a) <= apply_operator(s, acl, a) for a in p.domain)


def test_poset_is_partial_order(hyper):
    s, (d1, d2) = hyper
    p = build_poset(s, [("d0", [IDENTITY]), ("d1", d1), ("d2", d2)], "semilattice", 2,
                    adjoin=[semantic_operator(None)])
    leq = p.leq
    assert leq.diagonal().all()
    assert not (leq & leq.T & ~np.eye(len(p), dtype=bool)).any()
    composed = (leq.astype(int) @ leq.astype(int)) > 0
    assert (composed <= leq).all()
    assert p.names() == sorted(p.names())


def test_stats_on_boolean_lattice():
    s = equivalence([1])
    ops = [semantic_operator(None)]
    p = poset_from_operators(s, ops)
    assert lattice_stats(p).height == 1
    leq = boolean_lattice(3)
    assert not isomorphic(leq, boolean_lattice(2))
    chain = np.triu(np.ones((4, 4), dtype=bool))
    assert not isomorphic(chain, boolean_lattice(2))
    perm = [2, 0, 3, 1]
    assert isomorphic(chain, chain[np.ix_(perm, perm)])


def test_operators_equivalent(hyper):
    s, (d1, d2) = hyper
    union = d1 + d2[1:]
    assert operators_equivalent(s, union, compose_delta(union, 1))
    assert not operators_equivalent(s, d1, d2)


def test_dot_export_is_deterministic(hyper):
    s, (d1, d2) = hyper
    seeds = [("d0", [IDENTITY]), ("d1", d1), ("d2", d2)]
    dot = export_hasse_dot(build_poset(s, seeds, "semilattice", 2))
    assert dot == export_hasse_dot(build_poset(s, seeds, "semilattice", 2))
    assert dot.startswith("digraph operators {")
    assert "rankdir=BT" in dot and "n0 -> n1;" in dot and "n0 -> n2;" in dot
    assert "rank=source; n0;" in dot
