"""Algebraic sets over a parameter, and replacing semantic acl by a small Δ.

In three classes of size 3, naming 0 splits its class into {0} and {1, 2};
the other six points stay in one orbit.  Conjunctions of at most two
literals built from x = y and E(x, y) already witness every bounded closure.
"""

from algclosure import (IDENTITY, DEG_alg_u, acl_semantic, boolean_closure, deg_alg_u,
                        delta_operator, enumerate_algebraic_sets, equivalence, parse_param_formula)
from algclosure.closure import subsets_up_to

s = equivalence([3, 3, 3])
for b in enumerate_algebraic_sets(s, {0}, 3):
    print(f"  {sorted(b)}  deg = {deg_alg_u(s, {0}, b)}")
print("DEG over {0}:", DEG_alg_u(s, {0}), "; counting only orbits of size <= 3:", DEG_alg_u(s, {0}, 3))

cls = parse_param_formula("def cls(x; y) = E(x, y)", s.signature)
reduced = boolean_closure([IDENTITY, cls], 2)
print(f"{len(reduced)} formulas, e.g.:")
for pf in reduced[-3:]:
    print("  ", pf)
op = delta_operator(reduced, 3, iterate=False)
agree = all(op(s, a) == acl_semantic(s, a, 3) for a in subsets_up_to(s.size, s.size))
print("agrees with semantic acl_3 on all 512 subsets:", agree)
