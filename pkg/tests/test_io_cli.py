import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from fraisse_lab import cli
from fraisse_lab.amalgam import same_data
from fraisse_lab.core import GRAPH, NGon, cycle, empty, graph, metric, path, poset
from fraisse_lab.io import dumps, from_json, load, save, to_dot, to_json

from _oracles import rand_forest, rand_graph, rand_metric, rand_poset, seeded


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_json_roundtrip(seed):
    rng = seeded("io", seed)
    k = rng.randint(0, 6)
    s = rng.choice([rand_graph(rng, k), rand_poset(rng, k), rand_metric(rng, k), rand_forest(rng, k, 4)])
    back = from_json(json.loads(dumps(s)))
    assert same_data(back, s) and back.vertices == s.vertices and back.depth == s.depth


def test_json_details(tmp_path):
    p = tmp_path / "m.json"
    m = metric([0, 1], {(0, 1): "3/2"})
    save(m, p)
    assert json.loads(p.read_text())["dist"] == [[0, 1, "3/2"]]
    assert same_data(load(p), m)
    assert from_json({"class": "poset", "vertices": [0, 1], "order": [[0, 0], [0, 1]]}).order == {(0, 1)}
    with pytest.raises(ValueError):
        from_json({"class": "hypergraph"})


def test_dot():
    d = to_dot(cycle(6, NGon(3)), {5: 1})
    assert d.startswith("graph") and "shape=box" in d and "shape=circle" in d and 'xlabel="r1"' in d
    d = to_dot(poset([0, 1, 2], [(0, 1), (1, 2)]))
    assert "0 -> 1" in d and "1 -> 2" in d and "0 -> 2" not in d


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, s in {"empty": empty(GRAPH), "path5": path(5, NGon(3)), "two": graph([0, 1]),
                    "edge": graph([0, 1], [(0, 1)]), "c4": cycle(4, NGon(3)),
                    "pt": poset([0]), "pa": poset([0, 1], [(1, 0)]), "pb": poset([0, 1], [(0, 1)])}.items():
        save(s, tmp_path / f"{name}.json")
        out[name] = str(tmp_path / f"{name}.json")
    return out


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line.strip()]


def test_validate(capsys, files):
    code, rows = _run(capsys, "validate", files["empty"])
    assert code == 0 and rows[0]["ok"]
    code, rows = _run(capsys, "validate", files["c4"])
    assert code == 1 and "girth 4 < 6" in rows[0]["violation"]["message"]


def test_ngon_complete(capsys, files, tmp_path):
    dot = tmp_path / "h.dot"
    code, rows = _run(capsys, "ngon", "complete", "-n", "3", "--depth", "2", "--dot", str(dot), files["path5"])
    assert code == 0
    r = rows[0]
    assert r["fixpoint"] and r["vertices"] == 6 and r["girth"] == 6 and r["diameter"] == 3
    assert "graph" in dot.read_text()


def test_ngon_strong_and_fk(capsys, files):
    code, rows = _run(capsys, "ngon", "strong", "-n", "3", files["path5"], files["path5"])
    assert code == 0 and rows[0]["strong"]
    code, rows = _run(capsys, "ngon", "fk", "-n", "3", "-k", "1", files["path5"], "0", "2")
    assert rows[0]["value"] == 1 and rows[0]["caveat"] is None
    code, rows = _run(capsys, "ngon", "fk", "-n", "3", "-k", "1", files["path5"], "0", "4")
    assert rows[0]["value"] == 0 and rows[0]["caveat"]


def test_sir_check(capsys):
    code, rows = _run(capsys, "sir-check", "--kind", "free-graph", "--trials", "50", "--seed", "7")
    assert code == 0 and len(rows) == 6 and all(r["violations"] == 0 for r in rows)
    code, rows = _run(capsys, "sir-check", "--kind", "free-graph", "--trials", "100", "--seed", "7", "--mutant")
    assert code == 1


def test_amalgamate(capsys, files):
    code, rows = _run(capsys, "amalgamate", "--kind", "poset-amalgam", files["pt"], files["pa"], files["pb"])
    assert code == 0
    order = {tuple(p) for p in rows[0]["result"]["order"]}
    assert (1, 2) in order


def test_katetov_and_lift(capsys, files):
    code, rows = _run(capsys, "katetov", "--kind", "free-graph", "-k", "2", "--search-bound", "20", files["two"])
    assert code == 0 and rows[0]["sizes"] == [2, 6, 70]
    code, rows = _run(capsys, "lift", "--kind", "free-graph", files["two"], "0:1,1:0")
    assert code == 0
    assert rows[0]["sizes"] == [2, 6]
    assert {r["vertex"]: r["image"] for r in rows[1:]}[0] == 1
    code, _ = _run(capsys, "lift", "--kind", "free-graph", files["edge"], "0:0,1:0")
    assert code == 2


def test_saturate_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("FRAISSE_LAB_SEED", "3")
    code, rows = _run(capsys, "saturate", "--class", "graph", "--random")
    assert code == 0 and rows[0]["sizes"] == [0, 1, 3, 13]
    first = rows[0]["structure"]
    _, rows = _run(capsys, "saturate", "--class", "graph", "--random", "--seed", "3")
    assert rows[0]["structure"] == first


def test_bnf(capsys, files):
    code, rows = _run(capsys, "bnf-iso", "--depth", "2", files["two"], files["two"])
    assert code == 0 and rows[0]["equivalent"]
    code, rows = _run(capsys, "bnf-iso", "--depth", "2", files["two"], files["edge"])
    assert code == 1


def test_demo(capsys):
    code, rows = _run(capsys, "demo", "cor57")
    assert code == 0 and all(rows[0]["checks"].values())


def test_errors(capsys, files, tmp_path):
    assert cli.main(["validate", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["no-such-command"]) == 2
    assert cli.main(["katetov", "--kind", "free-graph", "--search-bound", "0", files["two"]]) == 2
    capsys.readouterr()


def test_console_script_is_deterministic(files):
    cmd = [sys.executable, "-m", "fraisse_lab.cli", "sir-check", "--kind", "complete-graph",
           "--trials", "20", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout
