"""Closures, chains and degrees on a few small structures.

A single edge already separates acl from dcl; linear orders are rigid so
the two never differ; a cyclic order is homogeneous until one point is named.
"""

from algclosure import (acl_dcl_difference, closure_chain, cyclic_order, deg_acl_of_structure,
                        is_rigid, linear_order, orbits, parse_structure)


def show(s):
    print(f"{s.name} (N = {s.size})")
    print("  orbits over the empty set:", [sorted(b) for b in orbits(s).blocks])
    chain = closure_chain(s, ())
    for n, x in enumerate(chain.sets):
        print(f"  acl_{n}(empty) = {sorted(x)}")
    rep = deg_acl_of_structure(s, min(2, s.size))
    print(f"  deg_acl over sets of size <= 2: {rep.structure_degree}, witness {sorted(rep.witness)}")
    print(f"  rigid: {is_rigid(s)}; acl-dcl-difference: {acl_dcl_difference(s)}")


k2 = parse_structure("structure k2\nuniverse 2\nrelation E/2 { (0,1) (1,0) }\n")
show(k2)
show(linear_order(4))
c5 = cyclic_order(5)
show(c5)

# naming any single point of the cycle makes everything definable
print("orbits of C5 over {0}:", [sorted(b) for b in orbits(c5, {0}).blocks])
