"""Posets of regular Δ-closure operators on coloured hypergraph fragments.

With two colours and bound 2 the operators {id}, {id, e1}, {id, e2} are
regular but their union is not transitive, so there is no join: the three
operators form a meet-semilattice, and adding the full acl on top closes it
into a four-element Boolean algebra.  Without a bound and with three colours
the seeds generate the eight-element Boolean lattice.
"""

import sys

from algclosure import (IDENTITY, acl_delta, build_poset, check_regular_delta,
                        colored_hypergraph_tree, export_hasse_dot, lattice_stats, parse_param_formula,
                        semantic_operator)
from algclosure.lattice import boolean_lattice, isomorphic


def colour_deltas(s):
    k = len(s.signature.relations)
    return [[IDENTITY, parse_param_formula(f"def e{c}(x; y) = E{c}(x, y) & !(x = y)", s.signature)]
            for c in range(1, k + 1)]


s = colored_hypergraph_tree(3, 2, 1)
d1, d2 = colour_deltas(s)
union = d1 + d2[1:]
once = acl_delta(s, union, {0}, 2)
print("one step of the union from {0}:", sorted(once))
print("two steps:", sorted(acl_delta(s, union, once, 2)))
print("union regular at n = 2:", check_regular_delta(s, union, 2).regular)

seeds = [("d0", [IDENTITY]), ("d1", d1), ("d2", d2)]
p = build_poset(s, seeds, "semilattice", 2)
st = lattice_stats(p)
print(f"{len(p)} operators; least: {st.least}; greatest: {st.greatest}")
q = build_poset(s, seeds, "semilattice", 2, adjoin=[semantic_operator(None)])
print("with acl adjoined:", q.names(), "Boolean:", isomorphic(q.leq, boolean_lattice(2)))

t = colored_hypergraph_tree(3, 3, 1)
lat = build_poset(t, [(f"d{i + 1}", d) for i, d in enumerate(colour_deltas(t))], "lattice", None)
st = lattice_stats(lat)
atoms = [lat.names()[j] for i, j in lat.hasse_edges if i == lat.least]
print(f"three colours: {len(lat)} operators, atoms {atoms}")
print(f"  height {st.height}, width {st.width}, distributive {st.distributive}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(export_hasse_dot(lat))
    print("Hasse diagram written to", sys.argv[1])
