from hypothesis import strategies as st

from algclosure.logic import (And, Atom, CountExists, Equal, Exists, Falsity, Forall, Implies, Not,
                              Or, ParamFormula, Truth)
from algclosure.structure import make_structure


@st.composite
def small_structures(draw, max_size=6, max_relations=2):
    """Random structures with unary/binary/ternary relations on at most
    ``max_size`` elements."""
    n = draw(st.integers(1, max_size))
    rels = {}
    for i in range(draw(st.integers(1, max_relations))):
        k = draw(st.integers(1, 3 if n <= 4 else 2))
        tuple_st = st.tuples(*[st.integers(0, n - 1)] * k)
        rels[f"R{i}"] = (k, draw(st.sets(tuple_st, max_size=3 * n)))
    return make_structure(n, rels, name="random")


def formulas(signature, variables=("x", "y", "z"), depth=3):
    """Quantifier-free random formulas over ``signature`` with variables
    drawn from ``variables``."""
    terms = st.sampled_from(variables)
    atoms = [st.builds(Equal, terms, terms), st.just(Truth()), st.just(Falsity())]
    for rel, k in signature.relations:
        atoms.append(st.builds(lambda args, r=rel: Atom(r, tuple(args)), st.lists(terms, min_size=k, max_size=k)))
    base = st.one_of(*atoms)
    if depth == 0:
        return base
    sub = formulas(signature, variables, depth - 1)
    return st.one_of(
        base,
        st.builds(Not, sub),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub),
    )


@st.composite
def quantified_formulas(draw, signature, depth=3):
    """Formulas in free ``x``, ``y`` under two quantifiers binding ``u`` and ``v``."""
    body = draw(formulas(signature, ("x", "y", "u", "v"), depth))
    for var in ("v", "u"):
        kind = draw(st.sampled_from(["exists", "forall", "count"]))
        if kind == "exists":
            body = Exists(var, body)
        elif kind == "forall":
            body = Forall(var, body)
        else:
            body = CountExists(draw(st.sampled_from(["=", "<=", ">="])), draw(st.integers(0, 3)), var, body)
    return body


def param_formula(body):
    return ParamFormula("f", "x", ("y",), body)
