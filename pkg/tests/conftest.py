import pytest

from algclosure.closure import IDENTITY
from algclosure.logic import parse_param_formula
from algclosure.structure import (colored_hypergraph_tree, complete_bipartite, cyclic_order,
                                  equivalence, linear_order, parse_structure)

K2_TEXT = """\
structure k2
universe 2
relation E/2 { (0,1) (1,0) }
"""


def k2():
    return parse_structure(K2_TEXT)


def fixture_structures():
    """Small instances of every fixture family, by label."""
    return {
        "k2": k2(),
        "linear-4": linear_order(4),
        "cyclic-5": cyclic_order(5),
        "equiv-3x3": equivalence([3, 3, 3]),
        "equiv-2x2x2": equivalence([2, 2, 2]),
        "bipartite-2x3x2": complete_bipartite(2, 3, 2),
        "hyper-321": colored_hypergraph_tree(3, 2, 1),
        "hyper-331": colored_hypergraph_tree(3, 3, 1),
    }


def hyper_deltas(s):
    """``Δ_i = {id, e_i}`` with ``e_i(x; y)`` the other members of y's i-class."""
    colors = sorted(int(r[1:]) for r, _ in s.signature.relations)
    return [[IDENTITY, parse_param_formula(f"def e{c}(x; y) = E{c}(x, y) & !(x = y)", s.signature)]
            for c in colors]


def two_deltas(label, s):
    """Two Δ families per fixture, each containing ``id``, all parameters
    unary so that composition stays small."""
    p = lambda t: parse_param_formula(t, s.signature)
    if label.startswith("hyper"):
        d = hyper_deltas(s)
        return d[0], d[1]
    if label.startswith("equiv"):
        return ([IDENTITY, p("def cls(x; y) = E(x, y)")],
                [IDENTITY, p("def mate(x; y) = E(x, y) & !(x = y)")])
    if label.startswith("bipartite"):
        return ([IDENTITY, p("def adj(x; y) = R(x, y)")],
                [IDENTITY, p("def side(x; y) = !R(x, y) & !(x = y)")])
    if label == "k2":
        return [IDENTITY, p("def adj(x; y) = E(x, y)")], [IDENTITY, p("def other(x; y) = !(x = y)")]
    if label.startswith("linear"):
        return ([IDENTITY, p("def above(x; y) = less(y, x)")],
                [IDENTITY, p("def below(x; y) = less(x, y)")])
    if label.startswith("cyclic"):
        return ([IDENTITY, p("def succ(x; y) = !(x = y) & !exists z. C(y, z, x)")],
                [IDENTITY, p("def pred(x; y) = !(x = y) & !exists z. C(x, z, y)")])
    raise KeyError(label)


@pytest.fixture(scope="session")
def structures():
    return fixture_structures()


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not report.failed:
        return
    name = report.nodeid.split("::")[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    key = name[len("test_criterion_"):].split("[")[0]
    ok = report.passed if report.when == "call" else False
    _CRITERIA[key] = _CRITERIA.get(key, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        num, _, desc = key.partition("_")
        terminalreporter.write_line(f"criterion {int(num):2d} {'PASS' if _CRITERIA[key] else 'FAIL'}  "
                                    f"{desc.replace('_', ' ')}")
