"""Algebraic and definable closure, degrees of algebraization and lattices of
Δ-closure operators on finite relational structures."""

from .algsets import (AlgebraicSetReport, DEG_alg_u, algebraic_part, deg_alg_u,
                      enumerate_algebraic_sets, in_family, is_A_algebraic)
from .automorphisms import (OrbitPartition, SizeCapError, find_automorphism, is_rigid, orbit_of,
                            orbits, stabilizer_group)
from .closure import (IDENTITY, ClosureChain, ClosureError, ClosureOperator, DegreeReport,
                      acl_dcl_difference, acl_delta, acl_semantic, apply_operator, bottom_operator,
                      closure_chain, dcl_semantic, deg_acl_of_set, deg_acl_of_structure,
                      delta_operator, delta_step, iterate_steps, semantic_operator, witnessed_sets)
from .lattice import (LatticeError, LatticeStats, OperatorPoset, boolean_closure, build_poset,
                      compose_delta, export_hasse_dot, join, lattice_stats, meet,
                      operators_equivalent)
from .logic import (FormulaError, FormulaSyntaxError, ParamFormula, count_solutions, evaluate,
                    format_delta, format_formula, parse_delta, parse_formula, parse_param_formula,
                    solutions)
from .pregeometry import (AxiomReport, GeometryError, GeometryQuotient, RegularityReport,
                          canonical_geometry, check_axioms, check_regular_delta)
from .structure import (Signature, Structure, StructureError, colored_hypergraph_tree,
                        complete_bipartite, cyclic_order, equivalence, generate_fixture,
                        linear_order, make_structure, parse_structure, serialize_structure,
                        structure_from_json, structure_to_json, validate_structure)

__version__ = "0.1.0"
