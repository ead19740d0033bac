import json
import subprocess
import sys

import pytest

from qpicrystal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "--datum", "osp14")
    assert code == 0
    assert out.count("ok") == 8


def test_validate_json_fail(capsys):
    bad = '{"A": [[2, -1], [-2, 2]], "parity": [1, 0], "d": [1, 1]}'
    code, out, _ = run(capsys, "validate", "--datum", bad, "--format", "json")
    assert code == 1
    conds = {c["condition"]: c["ok"] for c in json.loads(out)["conditions"]}
    assert not conds["d"] and conds["a"]


def test_crystal_bla_string(capsys):
    code, out, _ = run(capsys, "crystal-bla", "--datum", "osp12", "--lambda", "3", "--format", "json")
    assert code == 0
    g = json.loads(out)
    assert len(g["nodes"]) == 4 and len(g["edges"]) == 3
    assert all(e["i"] == 1 for e in g["edges"])
    assert set(g["nodes"][0]) >= {"id", "weight", "eps", "phi", "parity"}
    assert set(g["edges"][0]) == {"src", "dst", "i", "sign"}


def test_dot_output(capsys):
    code, out, _ = run(capsys, "crystal-binf", "--datum", "osp14", "--cutoff", "3", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph") and 'label="2"' in out and "sign=" in out


def test_pi_only_changes_rendering(capsys):
    outs = {}
    for pi in ("formal", "+1", "-1"):
        code, out, _ = run(capsys, "crystal-binf", "--datum", "osp14", "--cutoff", "4",
                           "--format", "json", "--pi", pi)
        assert code == 0
        outs[pi] = json.loads(out)
    strip = [{**g, "edges": [{k: v for k, v in e.items() if k != "sign"} for e in g["edges"]],
              "nodes": [{k: v for k, v in n.items() if k != "residue"} for n in g["nodes"]], "pi": None}
             for g in outs.values()]
    assert strip[0] == strip[1] == strip[2]
    signs = {pi: [e["sign"] for e in g["edges"]] for pi, g in outs.items()}
    assert set(signs["+1"]) == {"1"}
    assert [s == "pi" for s in signs["formal"]] == [s == "-1" for s in signs["-1"]]


def test_canonical_outputs(capsys):
    code, out, _ = run(capsys, "canonical", "--datum", "osp14", "--cutoff", "5", "--depth", "4,1")
    assert code == 0
    assert "G(f1^3 f2 f1) = (-q^(-1) - q*pi)*F1^(4)F2 + F1^(3)F2F1" in out
    code, out, _ = run(capsys, "canonical", "--datum", "osp14", "--cutoff", "5", "--depth", "4,1",
                       "--format", "tex", "--pi", "+1")
    assert r"\left(-q - q^{-1}\right)F_{1}^{(4)}F_{2}" in out
    code, out, _ = run(capsys, "canonical", "--datum", "osp14", "--cutoff", "3", "--format", "json",
                       "--lambda", "1,1")
    assert code == 0
    els = json.loads(out)["elements"]
    assert els and all(all(e["checks"].values()) for e in els)


def test_gram(capsys):
    code, out, _ = run(capsys, "gram", "--datum", "osp12", "--depth", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["gram"] == [["1"]]
    code, _, err = run(capsys, "gram", "--datum", "osp12")
    assert code == 2 and "--depth" in err


def test_tensor_rule_jobs_identical(capsys):
    args = ["tensor-rule", "--datum", "osp12", "--lambda", "1", "--lambda", "2", "--lambda", "3"]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args, "--jobs", "3")
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.count("PASS") == 9


@pytest.mark.parametrize("argv", [
    ["crystal-bla", "--lambda", "1"],              # wrong length for osp14
    ["crystal-bla", "--lambda", "1,-1"],           # not dominant
    ["crystal-bla", "--datum", "affine2", "--lambda", "1,0"],  # infinite without --cutoff
    ["crystal-binf", "--datum", "nope"],
    ["crystal-binf", "--datum", '{"A": [[2, -1], [-1, 2]], "parity": [1, 0], "d": [1, 1]}'],
    ["tensor-rule", "--lambda", "1,0"],
    ["canonical", "--format", "dot"],
    ["crystal-bla", "--lambda", "x"],
    ["nonsense"],
    ["validate", "--jobs", "0"],
])
def test_invalid_input_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_out_file(tmp_path, capsys):
    path = tmp_path / "g.dot"
    code, out, _ = run(capsys, "crystal-bla", "--datum", "osp12", "--lambda", "2", "--format", "dot",
                       "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("digraph")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qpicrystal", "validate", "--datum", "osp12"],
                       capture_output=True, text=True)
    assert r.returncode == 0


def test_export_module_json():
    from qpicrystal import export
    from qpicrystal.cartan import get_datum
    from qpicrystal.half import HalfAlgebra
    from qpicrystal.modules import IntegrableModule
    V = IntegrableModule(HalfAlgebra(get_datum("osp14"), cutoff=4), (1, 0))
    js = export.module_json(V)
    assert js["total_dim"] == 4
    assert [s["dim"] for s in js["spaces"]] == [1, 1, 1, 1]
    assert js["spaces"][0]["F"]["1"] == [["1"]]
    assert json.loads(export.dumps(js)) == js


def test_paper_examples_fail_only_on_misprints(capsys):
    from qpicrystal.reproductions import KNOWN_MISPRINTS
    code, out, _ = run(capsys, "paper-examples", "--format", "json")
    assert code == 1
    items = json.loads(out)["items"]
    failing = {it["name"] for it in items if not it["ok"]}
    assert failing == set(KNOWN_MISPRINTS)
    assert all(it["known_misprint"] for it in items if not it["ok"])
