"""Command-line front end, report formats, determinism, and replay."""

import json
import subprocess
import sys

import pytest

from goverify import scenarios
from goverify.cli import main
from goverify.report import parse_machine
from goverify.scenarios import ScenarioSpec, replay_report, scenario_catalog


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_algebra_validate_human(capsys):
    code, out, _ = run_cli(["algebra", "validate", "--family", "so", "--n", "5"], capsys)
    assert code == 0
    assert "validate: pass" in out


def test_algebra_validate_table_error(tmp_path, capsys):
    bad = tmp_path / "bad.table"
    bad.write_text("dim 3\n1 2 3 1\n")
    code, _, err = run_cli(["algebra", "validate", "--table", str(bad)], capsys)
    assert code == 1
    assert "antisymmetry" in err


def test_missing_arguments_is_usage_error(capsys):
    with pytest.raises(SystemExit):
        main(["check", "go", "--partition", "2,2,2"])


def test_check_regular_exit_codes(capsys):
    code, out, _ = run_cli(["check", "regular", "--family", "so", "--n", "6",
                            "--partition", "2,2,2"], capsys)
    assert code == 0
    code, out, _ = run_cli(["check", "regular", "--family", "so", "--n", "9",
                            "--partition", "3,3,3"], capsys)
    assert code == 2  # negative verdict, not an error
    assert "regular: no" in out


def test_check_go_machine_output_and_replay(tmp_path, capsys):
    report_path = tmp_path / "report.jsonl"
    code, out, _ = run_cli(["check", "go", "--family", "so", "--n", "6",
                            "--partition", "2,2,2", "--params", "1,2,3,4,5,6",
                            "--samples", "6", "--out", str(report_path)], capsys)
    assert code == 2
    header, records, summary = parse_machine(report_path.read_text())
    go_records = [r for r in records if r["name"] == "go"]
    assert go_records[0]["verdict"] == "Disproved"
    ce = go_records[0]["counterexample"]
    assert ce is not None and "/" not in ce["rank_a"].__str__()
    assert all("/" in v or v.lstrip("-").isdigit() for v in ce["direction"])
    code, out, _ = run_cli(["replay", str(report_path)], capsys)
    assert code == 0 and "failed=0" in out


def test_determinism_byte_identical(tmp_path, capsys):
    args = ["check", "natred", "--family", "so", "--n", "6", "--partition", "2,2,2",
            "--params", "2,2,7,2,3,3", "--seed", "5"]
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_cli(args + ["--out", str(p1)], capsys)
    run_cli(args + ["--out", str(p2)], capsys)
    assert p1.read_bytes() == p2.read_bytes()


def test_scenario_list_contains_catalog(capsys):
    code, out, _ = run_cli(["scenario", "list"], capsys)
    assert code == 0
    for name in ("so6-222-grid", "so9-333-regularity", "su3-torus-flag",
                 "triple-shape-demo", "so12-partition4-genmet1"):
        assert name in out


def test_catalog_has_expected_entries():
    catalog = scenario_catalog()
    assert len(catalog) >= 7
    assert catalog["so6-222-grid"].subgroup == {"partition": [2, 2, 2]}
    assert catalog["so12-partition4-genmet1"].subgroup == {"partition": [3, 3, 3, 3]}
    assert len(catalog["so12-partition4-genmet1"].metric["params"]) == 10
    grid = catalog["so8-233-grid"]
    assert grid.metric == {"grid": {"tuples": 200}}


def test_scenario_run_smoke_sweep(tmp_path, capsys):
    code, out, _ = run_cli(["scenario", "run", "so6-222-grid", "--tuples", "6",
                            "--samples", "6", "--out", str(tmp_path / "s.jsonl")], capsys)
    assert code == 0
    assert "agreement 6/6" in out
    outcome = replay_report((tmp_path / "s.jsonl").read_text())
    assert outcome["ok"]


def test_scenario_unknown_name(capsys):
    code, _, err = run_cli(["scenario", "run", "nope"], capsys)
    assert code == 1 and "unknown scenario" in err


def test_blockspec_file_roundtrip(tmp_path, capsys):
    spec = tmp_path / "metric.blocks"
    spec.write_text("# merged branch\n"
                    "block k1 scalar 2\nblock k2 scalar 2\nblock k3 scalar 7\n"
                    "block m1_2 scalar 2\nblock m1_3 scalar 3\nblock m2_3 scalar 3\n")
    code, out, _ = run_cli(["check", "natred", "--family", "so", "--n", "6",
                            "--partition", "2,2,2", "--blockspec", str(spec)], capsys)
    assert code == 2  # trilinear condition w.r.t. the torus fails; form holds via k'
    assert "naturally reductive: yes" in out


def test_machine_report_schema(tmp_path, capsys):
    path = tmp_path / "m.jsonl"
    run_cli(["check", "weakly-regular", "--family", "so", "--n", "6",
             "--partition", "2,2,2", "--out", str(path), "--machine"], capsys)
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["record"] == "header" and header["format"] == "goverify.report"
    assert header["schema"] == 1 and "spec_hash" in header
    summary = json.loads(lines[-1])
    assert summary["record"] == "summary"


def test_cli_entrypoint_subprocess():
    out = subprocess.run([sys.executable, "-m", "goverify", "scenario", "list"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "so6-222-grid" in out.stdout


def test_spec_roundtrip():
    spec = scenario_catalog()["so6-222-grid"]
    again = ScenarioSpec.from_obj(json.loads(json.dumps(spec.to_obj())))
    assert again == spec


def test_float_backend_pipeline(capsys):
    code, out, _ = run_cli(["check", "go", "--family", "so", "--n", "6",
                            "--partition", "2,2,2", "--params", "1,2,3,4,5,6",
                            "--backend", "float", "--samples", "4"], capsys)
    assert code == 2
    assert "Disproved" in out  # exact escalation still certifies the negative


def test_subspace_file_subgroup(tmp_path, capsys):
    from goverify.lie import build_classical, embed_so_partition
    from goverify.subspaces import serialize_subspace
    layout = embed_so_partition(6, (2, 2, 2))
    path = tmp_path / "torus.subspace"
    path.write_text(serialize_subspace(layout.subalgebra))
    code, out, _ = run_cli(["check", "regular", "--family", "so", "--n", "6",
                            "--subspace", str(path)], capsys)
    assert code == 0
    assert "regular: yes" in out


def test_human_report_bi_invariant_phrase(capsys):
    code, out, _ = run_cli(["check", "natred", "--family", "so", "--n", "6",
                            "--partition", "2,2,2", "--params", "1,1,1,1,1,1"], capsys)
    assert code == 0
    assert "naturally reductive: yes (bi-invariant)" in out
