"""Command-line interface: formats, scenarios, determinism, exit codes."""

import json

from locce.cli import COLUMNS, Row, emit, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_ghz_subcommand_passes(capsys):
    code, out, _ = run_cli(capsys, "ghz", "--n", "3", "--sizes", "1,1,1")
    assert code == 0
    assert "sequential-bell" in out
    assert "pass" in out


def test_ghz_partitioned_row(capsys):
    code, out, _ = run_cli(capsys, "ghz", "--n", "3", "--sizes", "2,1")
    assert code == 0
    assert "partitioned-ghz" in out


def test_lattice_csv_has_eight_fields(capsys):
    code, out, _ = run_cli(capsys, "lattice", "--n", "2", "--m", "1", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == ",".join(COLUMNS)
    for line in lines[1:]:
        assert len(line.split(",")) == 8
    row = dict(zip(COLUMNS, lines[1].split(",")))
    assert row["fidelity"] == "0.5"
    assert row["bound"] == "0.25"
    assert row["status"] == "pass"


def test_parametric_json_keys(capsys):
    code, out, _ = run_cli(capsys, "parametric", "--alpha", "0.9", "--gamma", "0.8",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert len(payload) == 2
    for entry in payload:
        assert tuple(entry.keys()) == COLUMNS
    assert payload[0]["fidelity"] == "0.725"


def test_example4_passes(capsys):
    code, out, _ = run_cli(capsys, "example4", "--format", "csv")
    assert code == 0
    assert all(line.split(",")[6] == "pass" for line in out.strip().splitlines()[1:])


def test_graph_named(capsys):
    code, out, _ = run_cli(capsys, "graph", "--graph", "triangle", "--format", "csv")
    assert code == 0
    assert "bell-orbit-decode" in out


def test_graph_edge_list(capsys):
    code, out, _ = run_cli(capsys, "graph", "--edges", "0-1,1-2", "--format", "csv")
    assert code == 0


def test_bounds_ghz(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--family", "ghz", "--n", "3",
                           "--format", "csv")
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert row[3] == "0.5" and row[4] == "0.5"


def test_oneway_quick(capsys):
    code, out, _ = run_cli(capsys, "oneway", "--lambdas", "1,1", "--outcomes", "4",
                           "--restarts", "3", "--seed", "4", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert any("explicit-certificate" in line for line in lines)


def test_missing_field_names_it(capsys):
    code, _, err = run_cli(capsys, "lattice", "--n", "2")
    assert code == 2
    assert "'m'" in err


def test_bad_graph_name(capsys):
    code, _, err = run_cli(capsys, "graph", "--graph", "dodecahedron")
    assert code == 2
    assert "dodecahedron" in err


def test_scenario_file_with_flag_override(tmp_path, capsys):
    scenario = tmp_path / "s.json"
    scenario.write_text(json.dumps({
        "scenario": "from-file", "family": "lattice", "n": 2, "m": 2, "format": "csv",
    }))
    code, out, _ = run_cli(capsys, "lattice", "--scenario", str(scenario), "--m", "1")
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert row[0] == "from-file"
    assert row[3] == "0.5"  # m=1 flag overrode the file's m=2


def test_scenario_family_mismatch(tmp_path, capsys):
    scenario = tmp_path / "s.json"
    scenario.write_text(json.dumps({"family": "ghz", "n": 3}))
    code, _, err = run_cli(capsys, "lattice", "--scenario", str(scenario))
    assert code == 2
    assert "family" in err


def test_scenario_invalid_json(tmp_path, capsys):
    scenario = tmp_path / "s.json"
    scenario.write_text("{not json")
    code, _, err = run_cli(capsys, "lattice", "--scenario", str(scenario))
    assert code == 2
    assert "invalid JSON" in err


def test_byte_identical_output_with_timing_off(capsys):
    args = ("oneway", "--lambdas", "1.6,0.4", "--outcomes", "4", "--restarts", "3",
            "--seed", "7", "--format", "csv", "--timing", "off")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_seed_env_var_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LOCCE_SEED", "123")
    code, out, _ = run_cli(capsys, "oneway", "--lambdas", "1,1", "--outcomes", "4",
                           "--restarts", "2", "--format", "csv", "--timing", "off")
    assert code == 0
    monkeypatch.setenv("LOCCE_SEED", "123")
    code2, out2, _ = run_cli(capsys, "oneway", "--lambdas", "1,1", "--outcomes", "4",
                             "--restarts", "2", "--format", "csv", "--timing", "off")
    assert out == out2


def test_emit_empty_is_header_only():
    assert emit([], "csv") == ",".join(COLUMNS)
    table = emit([], "table")
    assert table.splitlines()[0].split() == list(COLUMNS)
    assert json.loads(emit([], "json")) == []


def test_emit_single_row_csv():
    row = Row("s", "f", "p", "0.5", "0.25", "0.5", "pass", 12.3456)
    line = emit([row], "csv").splitlines()[1]
    assert line == "s,f,p,0.5,0.25,0.5,pass,12.346"
    line_no_ms = emit([row], "csv", timing=False).splitlines()[1]
    assert line_no_ms.endswith(",0")
