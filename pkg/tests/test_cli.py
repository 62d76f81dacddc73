from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from cmweyl.cli import EXIT_ACCEPT, EXIT_DATA, EXIT_OK, EXIT_PARSE, RunConfig, build_parser, run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_group_orbit_transitive(capsys):
    code, out, _ = _run(capsys, "group", "--degree", "5", "--label", "5T5", "--check", "orbit")
    assert code == EXIT_OK
    assert out.strip() == "orbit size 32 = 2^5: transitive"


def test_group_other_checks(capsys):
    assert "= 48 = 2^3 * 6" in _run(capsys, "group", "--degree", "3", "--label", "S3", "--check", "order")[1]
    assert "non-abelian" in _run(capsys, "group", "--degree", "2", "--label", "2T1", "--check", "abelian")[1]
    assert "min index 4" in _run(capsys, "group", "--degree", "5", "--label", "C5", "--check", "index")[1]
    code, out, _ = _run(capsys, "group", "--degree", "4", "--gens", "(1,2)", "(3,4)", "--mask", "0101")
    assert code == EXIT_OK and "intransitive" in out


def test_exponents_golden(capsys):
    code, out, _ = _run(capsys, "exponents", "--d", "5", "--delta", "2/5", "--malle", "1", "--subconvex", "1/2")
    assert code == EXIT_OK
    assert out.strip() == "C1=3/10 alpha=19/25 beta=17/20 C2=3/20 C3=3/20"
    code, out, _ = _run(capsys, "exponents", "--d", "5", "--delta", "2/5", "--malle", "1",
                        "--subconvex", "1/2", "--emit", "json")
    data = json.loads(out)
    assert (data["C2"], data["C3"]) == ("3/20", "3/20")


def test_exponents_hypothesis_failure_is_data_error(capsys):
    code, _, err = _run(capsys, "exponents", "--d", "5", "--delta", "1/2", "--malle", "3/2")
    assert code == EXIT_DATA
    assert "HypothesisError" in err


def test_classify_cyclotomic(capsys):
    code, out, _ = _run(capsys, "classify", "--disc", "5", "--alpha=-5/2,-1/2", "--emit", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert (data["galois_type"], data["rel_norm"], data["abs_disc"], data["weyl"]) == ("C4", 5, 125, False)
    code, out, _ = _run(capsys, "classify", "--disc", "8", "--alpha=-1,0")
    assert "galois_type: V4" in out and "abs_disc: 256" in out


@pytest.mark.parametrize("argv", [
    ["classify", "--disc", "5", "--alpha=-5/2,-1/3"],
    ["classify", "--disc", "20", "--alpha=-1,0"],
    ["classify", "--disc", "5", "--alpha", "1,0"],
])
def test_classify_data_errors(capsys, argv):
    assert _run(capsys, *argv)[0] == EXIT_DATA


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["residues"],
    ["group", "--degree", "x"],
    ["group", "--degree", "5"],
    ["classify", "--disc", "5", "--alpha", "a,b"],
    ["exponents", "--d", "5"],
    ["exponents", "--d", "5", "--malle", "0"],
    ["residues", "--degree", "3", "--synth", "100"],
    ["count-cm", "--x", "1000", "--emit", "xml"],
])
def test_bad_arguments_exit_1(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == EXIT_PARSE
    assert err.startswith("error:")


def test_missing_catalog_exit_2(capsys, tmp_path):
    code, _, err = _run(capsys, "residues", "--degree", "3", "--catalog", str(tmp_path / "none.tsv"))
    assert code == EXIT_DATA
    assert "error" in err
    assert _run(capsys, "group", "--degree", "4", "--label", "5T1")[0] == EXIT_DATA


def test_residues_csv_columns(capsys):
    code, out, _ = _run(capsys, "residues", "--degree", "3", "--first", "300", "--emit", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["group", "n_fields", "min_disc", "residue", "proportion"]
    assert [r[0] for r in rows[1:]] == ["all", "3T1", "3T2"]
    assert float(rows[2][3]) == pytest.approx(2.2862e-5, rel=1e-3)
    assert rows[1][4] == ""


def test_residues_single_group_json_round_trip(capsys):
    from cmweyl.residues import ResidueReport

    code, out, _ = _run(capsys, "residues", "--degree", "2", "--synth", "500", "--group", "C2", "--emit", "json")
    assert code == EXIT_OK
    rep = ResidueReport.from_dict(json.loads(out))
    assert rep.group == "2T1" and rep.min_disc == 5
    assert ResidueReport.from_dict(rep.to_dict()) == rep


def test_proportions_table(capsys):
    code, out, _ = _run(capsys, "proportions", "--degree", "3", "--first", "200", "--emit", "json")
    rows = json.loads(out)
    assert code == EXIT_OK
    assert sum(r["proportion"] for r in rows) == pytest.approx(1.0)


def test_count_cm(capsys):
    code, out, _ = _run(capsys, "count-cm", "--x", "10000", "--checkpoints", "1000,10000", "--emit", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["X", "n_cm", "n_weyl", "n_not_weyl", "ratio_weyl"]
    assert rows[1][:4] == ["1000", "9", "0", "9"]
    assert rows[2][:4] == ["10000", "99", "54", "45"]
    code, out, _ = _run(capsys, "count-cm", "--x", "2000", "--per-d", "--emit", "json")
    assert json.loads(out)["per_d"]["5"] >= 1


def test_catalog_commands(capsys, tmp_path):
    path = tmp_path / "q.tsv"
    code, out, _ = _run(capsys, "catalog", "synth", "--max-disc", "100", "--out", str(path), "--emit", "csv")
    assert code == EXIT_OK
    assert list(csv.reader(io.StringIO(out)))[1] == ["2T1", "30", "5", "97"]
    code, out, _ = _run(capsys, "catalog", "load", "--degree", "2", "--catalog", str(path),
                        "--emit", "json", "--records")
    data = json.loads(out)
    assert len(data["records"]) == 30 and data["records"][0]["disc"] == 5
    code, out, _ = _run(capsys, "catalog", "load", "--degree", "4", "--max-disc", "2000")
    assert code == EXIT_OK and "4T3" in out


def test_run_config_replay(capsys, tmp_path):
    cfg_path = tmp_path / "run.json"
    argv = ["--save-config", str(cfg_path), "exponents", "--d", "5", "--delta", "2/5",
            "--malle", "1", "3/2", "--subconvex", "1/2"]
    _, first, _ = _run(capsys, *argv)
    cfg = RunConfig.from_json(cfg_path.read_text())
    assert cfg.command == ["exponents"]
    assert RunConfig.from_json(cfg.to_json()) == cfg
    _, again, _ = _run(capsys, *cfg.argv())
    assert again == first
    ns = build_parser().parse_args(cfg.argv())
    assert RunConfig.from_namespace(ns) == cfg


def test_verify_subset(capsys):
    code, out, _ = _run(capsys, "verify", "--only", "5,6")
    assert code == EXIT_OK
    assert "[PASS] criterion 5" in out and "[PASS] criterion 6" in out
    assert "2/2 criteria passed" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmweyl", "group", "--degree", "3", "--label", "C3"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "orbit size 8 = 2^3: transitive"
    proc = subprocess.run([sys.executable, "-m", "cmweyl", "nope"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 1


def test_exit_code_constants():
    assert (EXIT_OK, EXIT_PARSE, EXIT_DATA, EXIT_ACCEPT) == (0, 1, 2, 3)
