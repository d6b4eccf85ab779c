"""CLI surface: routing, formats, exit codes, round-trips."""
import json

from pedigree.cli import main
from pedigree.cycles import Pedigree


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_graph_json(capsys):
    code, out, _ = run(
        capsys, "graph",
        "--a", "n:10;idx:1,2,4,2,6,8,8", "--b", "n:10;idx:3,1,3,5,7,8,3",
    )
    assert code == 0
    d = json.loads(out)
    assert d["vertices"] == [4, 5, 7, 8, 9, 10]
    assert d["connected"] is True
    assert {"u": 9, "v": 10, "tag": "T2-AB"} in d["edges"]


def test_graph_dot_and_text(capsys):
    code, out, _ = run(capsys, "graph", "--a", "n:5;idx:1,1", "--b", "n:5;idx:3,2",
                       "--format", "dot")
    assert code == 0 and out.startswith("graph pedigree {")
    code, out, _ = run(capsys, "graph", "--a", "n:5;idx:1,1", "--b", "n:5;idx:3,2",
                       "--format", "text")
    assert code == 0 and "connected: False" in out


def test_adjacent_exit_codes(capsys):
    code, out, _ = run(capsys, "adjacent", "--a", "n:4;idx:1", "--b", "n:4;idx:2")
    assert code == 0 and json.loads(out)["adjacent"] is True
    code, _, err = run(capsys, "adjacent", "--a", "n:4;idx:1", "--b", "n:4;idx:1")
    assert code == 1 and "identical pedigree" in err
    code, _, err = run(capsys, "adjacent", "--a", "n:4;idx:9", "--b", "n:4;idx:1")
    assert code == 1
    code, _, err = run(capsys, "adjacent", "--a", "n:4;idx:1", "--b", "n:5;idx:1,2")
    assert code == 1


def test_simulate_csv_and_json(capsys):
    code, out, _ = run(capsys, "simulate", "--alice", "random", "--n", "30",
                       "--samples", "150", "--seed", "3")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("strategy,n,samples,")
    assert row.startswith("random,30,150,")
    code, out, _ = run(capsys, "simulate", "--alice", "greedy-common", "--n", "20",
                       "--samples", "50", "--seed", "3", "--format", "json")
    assert code == 0
    assert json.loads(out)["games"] == 50


def test_simulate_config_file(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "strategy = random\nn_targets = 25\nsamples = 60\nmaster_seed = 5\n"
    )
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--format", "json")
    assert code == 0
    assert json.loads(out)["games"] == 60


def test_census_cli(capsys):
    code, out, _ = run(capsys, "census", "--n", "5")
    assert code == 0
    d = json.loads(out)
    assert (d["vertices"], d["edges"], d["complete"]) == (12, 60, False)
    code, _, err = run(capsys, "census", "--n", "9")
    assert code == 1


def test_verify_polytope_cli(capsys):
    code, out, _ = run(capsys, "verify-polytope", "--n", "4")
    assert code == 0
    d = json.loads(out)
    assert d["disagreements"] == 0 and d["complete"] is True


def test_verify_transitions_cli(capsys):
    code, out, _ = run(capsys, "verify-transitions", "--games", "6", "--n-max", "25",
                       "--seed", "2")
    assert code == 0
    d = json.loads(out)
    assert d["strict_failures"] == 0
    assert d["instances"] == 6 * 22


def test_example_cli(capsys):
    code, out, _ = run(capsys, "example")
    assert code == 0
    assert "vertex 8 is isolated" in out
    assert "connected=True" in out
    code, out, _ = run(capsys, "example", "--format", "json")
    d = json.loads(out)
    assert d["connected"] is True
    assert d["a"] == "n:10;idx:1,2,4,2,6,8,8"


def test_enumerate_and_roundtrip(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "5")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 12
    # every emitted pedigree string is accepted back verbatim
    for line in lines[:4]:
        code2, out2, _ = run(capsys, "adjacent", "--a", lines[0], "--b", line)
        assert code2 == (1 if line == lines[0] else 0)
    code, out, _ = run(capsys, "enumerate", "--n", "4", "--form", "nu", "--cycles")
    assert "n:4;nu:1-2" in out


def test_sample_cli_roundtrip(capsys):
    code, out, _ = run(capsys, "sample", "--n", "12", "--count", "3", "--seed", "9")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    for line in lines:
        assert Pedigree.from_text(line).n == 12
    code2, out2, _ = run(capsys, "sample", "--n", "12", "--count", "3", "--seed", "9")
    assert out2 == out


def test_schema_cli(capsys):
    code, out, _ = run(capsys, "schema")
    assert code == 0
    d = json.loads(out)
    assert "graph-json" in d and "aggregate-csv-header" in d


def test_out_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    code, out, _ = run(capsys, "graph", "--a", "n:4;idx:1", "--b", "n:4;idx:2",
                       "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["connected"] is True
