"""Bounded algebraic closure need not satisfy exchange.

Two disjoint copies of K_{2,3}: over the empty set the small sides form one
orbit of size 4, so acl_2 sees nothing.  Naming a vertex b of a large side
pins down its partners {0, 1} (an orbit of size 2), but naming 0 leaves b in
an orbit of size 3.
"""

from algclosure import check_axioms, complete_bipartite, semantic_operator
from algclosure.pregeometry import report_by_axiom, revalidate

s = complete_bipartite(2, 3, 2)
for n in (2, 3):
    op = semantic_operator(n)
    reports = report_by_axiom(check_axioms(s, op))
    ex = reports["exchange"]
    print(f"acl_{n}: exchange {'holds' if ex.holds else 'fails'}")
    if not ex.holds:
        ce = ex.counterexample
        x, a, b = ce["X"], ce["a"], ce["b"]
        print(f"  X = {sorted(x)}, a = {a}, b = {b}")
        print(f"  acl_{n}(X + b) = {sorted(op(s, x | {b}))}")
        print(f"  acl_{n}(X + a) = {sorted(op(s, x | {a}))}")
        print(f"  re-validated: {revalidate(s, op, ex)}")

# with n = 3 one vertex of a large side closes up its whole component
print("acl_3({2}) =", sorted(semantic_operator(3)(s, {2})))
