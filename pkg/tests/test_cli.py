import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from samc.cli import CSV_COLUMNS, SCHEMA, main
from samc.core import canonicalize


def run_json(args, capsys):
    code = main(args + ["--no-timestamp"])
    out = capsys.readouterr().out
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc, out


def test_graph_records_are_canonical(capsys):
    code, doc, _ = run_json(["graph", "--n", "100", "--t", "0", "--replicas", "3", "--seed", "1",
                             "--format", "json"], capsys)
    assert code == 0 and len(doc["data"]) == 3
    assert [d["replica"] for d in doc["data"]] == [0, 1, 2]
    for d in doc["data"]:
        pairs = [tuple(p) for p in d["pairs"]]
        assert canonicalize(pairs).pairs() == pairs
        assert sum(x for x, _ in pairs) == pytest.approx(100 ** (1 / 3))
    assert doc["meta"]["params"] == {"n": 100, "t": 0.0, "replicas": 3, "kind": "multigraph"}
    assert "timestamp" not in doc["meta"]


def test_timestamp_present_by_default(capsys):
    main(["graph", "--n", "10"])
    doc = json.loads(capsys.readouterr().out)
    jsonschema.validate(doc, SCHEMA)
    assert "timestamp" in doc["meta"]


@pytest.mark.parametrize("cmd", [
    ["graph", "--kind", "simple", "--n", "60"],
    ["sbfw", "--n", "60"],
    ["limit", "--horizon", "4", "--step", "1e-3"],
    ["chain", "--n", "20", "--times", "0.5,1,2"],
])
def test_every_command_is_deterministic_across_workers(cmd, capsys):
    base = cmd + ["--replicas", "4", "--seed", "9"]
    _, doc, one = run_json(base + ["--workers", "1"], capsys)
    _, _, two = run_json(base + ["--workers", "2"], capsys)
    assert one == two
    assert len(doc["data"]) == 4


def test_sbfw_records(capsys):
    _, doc, _ = run_json(["sbfw", "--n", "80", "--replicas", "2"], capsys)
    for d in doc["data"]:
        assert sum(e["length"] for e in d["excursions"]) == pytest.approx(80 ** (1 / 3))
        pairs = [tuple(p) for p in d["pairs"]]
        assert canonicalize(pairs).pairs() == pairs


def test_chain_observations(capsys):
    _, doc, _ = run_json(["chain", "--n", "15", "--times", "1,2"], capsys)
    obs = doc["data"][0]["observations"]
    assert [o["time"] for o in obs] == [1.0, 2.0]


def test_csv_output(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["sbfw", "--n", "50", "--replicas", "2", "--format", "csv", "-o", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == CSV_COLUMNS
    assert {r[0] for r in rows[1:]} == {"0", "1"}
    assert all(r[4] != "" for r in rows[1:])
    assert main(["graph", "--n", "50", "--format", "csv", "-o", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[1][:2] == ["0", "1"] and rows[1][4] == ""


def test_path_dump(tmp_path, capsys):
    path = tmp_path / "path.csv"
    code = main(["limit", "--horizon", "1", "--step", "0.01", "--path-dump", str(path)])
    capsys.readouterr()
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "s,W_t,B_t" and len(lines) == 102


def test_compare_reports_ks(capsys):
    code, doc, _ = run_json(["compare", "--a", "sbfw", "--b", "graph", "--n", "50", "--t", "0",
                             "--replicas", "2000"], capsys)
    (report,) = doc["data"]
    assert code == 0
    assert report["estimates"]["ks"] <= report["estimates"]["critical"] and report["passed"]


@pytest.mark.parametrize("args", [
    ["graph", "--n", "0"],
    ["graph", "--n", "8", "--t", "-5"],
    ["graph", "--replicas", "0"],
    ["limit", "--eps", "100", "--horizon", "5"],
    ["limit", "--step", "-1"],
    ["chain", "--times", "2,1"],
    ["graph", "--workers", "0"],
    ["graph", "--bogus"],
    ["compare", "--a", "graph"],
    ["nonsense"],
    [],
])
def test_invalid_arguments_exit_2(args, capsys):
    assert main(args) == 2
    captured = capsys.readouterr()
    assert captured.out == "" and "error" in captured.err


def test_validate_twice_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["validate", "--quick", "--seed", "7", "--no-timestamp", "-o", str(a)]) == 0
    assert main(["validate", "--quick", "--seed", "7", "--no-timestamp", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert all(r["passed"] for r in doc["data"])
    assert "[PASS]" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "samc", "graph", "--n", "5", "--no-timestamp"],
                          capture_output=True, text=True, check=True)
    jsonschema.validate(json.loads(proc.stdout), SCHEMA)


def test_validate_failure_exits_1(monkeypatch, capsys):
    from samc import cli
    from samc.stats import CheckReport

    failing = [CheckReport("broken", {"x": 1.0}, {}, 0.0, False, 1, 0)]
    monkeypatch.setattr(cli, "run_suite", lambda seed, quick: failing)
    assert main(["validate", "--no-timestamp"]) == 1
    captured = capsys.readouterr()
    assert "[FAIL] broken" in captured.err
    assert json.loads(captured.out)["data"][0]["passed"] is False
