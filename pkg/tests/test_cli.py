import json
import re
import shlex
import subprocess
import sys

import pytest

from algclosure.cli import main
from algclosure.structure import parse_structure, serialize_structure

from conftest import K2_TEXT


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "k2.struct").write_text(K2_TEXT)
    main(["gen", "linear-order", "4", "-o", "chain4.struct"])
    main(["gen", "colored-hypergraph-tree", "3,2,1", "-o", "hyper.struct"])
    main(["gen", "complete-bipartite", "2", "3", "2", "-o", "kb.struct"])
    (tmp_path / "d0.delta").write_text("def id(x; y) = x = y\n")
    for c in (1, 2):
        (tmp_path / f"d{c}.delta").write_text(
            f"def id(x; y) = x = y\ndef e{c}(x; y) = E{c}(x, y) & !(x = y)\n")
    (tmp_path / "d12.delta").write_text(
        "def id(x; y) = x = y\ndef e1(x; y) = E1(x, y) & !(x = y)\ndef e2(x; y) = E2(x, y) & !(x = y)\n")
    return tmp_path


def test_documented_examples(files, capsys):
    assert run(capsys, "closure", "-s", "k2.struct", "-A", "", "--n", "2")[1] == "acl_2(∅) = {0, 1}\n"
    assert run(capsys, "diff", "-s", "chain4.struct")[1] == "acl-dcl-difference (within-model): 0\n"
    code, out, _ = run(capsys, "lattice", "-s", "hyper.struct", "--seeds", "d0.delta,d1.delta,d2.delta", "--n", "2")
    assert code == 0
    assert out.splitlines()[0] == "3 operators; least: d0; greatest: none"


def test_json_schema(files, capsys):
    code, out, _ = run(capsys, "closure", "-s", "k2.struct", "-A", "", "--n", "2", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["closure"] == [0, 1] and doc["A"] == []
    for argv in (["orbits", "-s", "kb.struct"], ["chain", "-s", "k2.struct", "-A", ""],
                 ["degree", "-s", "k2.struct"], ["diff", "-s", "k2.struct"],
                 ["algsets", "-s", "kb.struct", "-A", "0"], ["axioms", "-s", "kb.struct", "--semantic", "--n", "2"],
                 ["lattice", "-s", "hyper.struct", "--seeds", "d1.delta,d2.delta", "--n", "2"],
                 ["report", "-s", "k2.struct"]):
        code, out, _ = run(capsys, *argv, "--json")
        assert code == 0, argv
        assert json.loads(out)["schema"] == 1


def test_exit_codes(files, capsys):
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys, "closure", "-s", "k2.struct", "--bogus")[0] == 2
    assert run(capsys, "closure", "-s", "k2.struct", "-A", "x,y")[0] == 2
    assert run(capsys, "closure", "-s", "k2.struct", "--iterate")[0] == 2
    assert run(capsys, "axioms", "-s", "k2.struct", "--n", "1")[0] == 2
    code, _, err = run(capsys, "closure", "-s", "k2.struct", "-A", "9")
    assert code == 1 and "outside the universe" in err
    assert run(capsys, "closure", "-s", "missing.struct")[0] == 1
    (files / "bad.struct").write_text("universe 2\nrelation E/2 { (0,1,1) }\n")
    code, _, err = run(capsys, "orbits", "-s", "bad.struct")
    assert code == 1 and "line 2" in err
    code, _, err = run(capsys, "lattice", "-s", "hyper.struct", "--seeds", "d12.delta", "--n", "2")
    assert code == 1 and "not regular" in err


def test_determinism(files, capsys):
    argv = ["report", "-s", "kb.struct"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    argv = ["lattice", "-s", "hyper.struct", "--seeds", "d0.delta,d1.delta,d2.delta", "--n", "2", "--dot", "h.dot"]
    first = run(capsys, *argv)[1], (files / "h.dot").read_text()
    assert first == (run(capsys, *argv)[1], (files / "h.dot").read_text())
    assert first[1].startswith("digraph")


def test_axiom_counterexamples_rerun(files, capsys):
    for argv in (["axioms", "-s", "kb.struct", "--semantic", "--n", "2"],
                 ["axioms", "-s", "hyper.struct", "--delta", "d12.delta", "--n", "2"]):
        code, out, _ = run(capsys, *argv)
        assert code == 0
        reruns = re.findall(r"\$ (algclosure closure .*?)(?:    # (contains|lacks) (\d+))?$", out, re.M)
        assert reruns
        for cmd, verb, elem in reruns:
            c, res, _ = run(capsys, *shlex.split(cmd)[1:])
            assert c == 0
            if verb:
                closure = res.split(" = ", 1)[1].strip()
                members = set() if closure == "∅" else {int(x) for x in closure.strip("{}").split(",")}
                assert (int(elem) in members) == (verb == "contains")


def test_exchange_failure_reported(files, capsys):
    out = run(capsys, "axioms", "-s", "kb.struct", "--semantic", "--n", "2")[1]
    assert re.search(r"exchange\s+FAILS", out)
    out = run(capsys, "axioms", "-s", "kb.struct", "--semantic", "--n", "3")[1]
    assert re.search(r"exchange\s+holds", out)


def test_gen_roundtrip(files, capsys):
    code, out, _ = run(capsys, "gen", "equivalence", "3,3,3")
    assert code == 0
    s = parse_structure(out)
    assert s.size == 9 and serialize_structure(s) == out
    assert run(capsys, "gen", "equivalence", "3,3,3", "--json")[0] == 0


def test_delta_closure_flags(files, capsys):
    assert run(capsys, "closure", "-s", "hyper.struct", "-A", "0", "--n", "2", "--delta", "d12.delta")[1] == \
        "acl^Δ_2({0}) = {0, 1, 2, 3, 4}\n"
    assert run(capsys, "closure", "-s", "hyper.struct", "-A", "0", "--n", "2", "--delta", "d12.delta",
               "--iterate")[1] == "acl^Δ_2*({0}) = {0, 1, 2, 3, 4, 5, 6, 7, 8}\n"


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "algclosure", "diff", "-s", "chain4.struct"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "acl-dcl-difference (within-model): 0\n"
