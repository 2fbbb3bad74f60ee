import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from drknn import cli
from drknn.lfd import SolverError, SolverStatus

SCHEMA = json.loads(resources.files("drknn").joinpath("report_schema.json").read_text())


def run_json(argv, tmp_path, name="r.json"):
    out = tmp_path / name
    code = cli.run(argv + ["--out", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def test_lfd_two_point(tmp_path):
    code, rep = run_json(["lfd", "--dataset", "builtin:two_point", "--radii", "0.25"], tmp_path)
    assert code == 0
    jsonschema.validate(rep, SCHEMA)
    assert rep["schema_version"] == 1
    assert rep["result"]["objective"] == pytest.approx(1.5, abs=1e-6)
    assert rep["result"]["minimax_risk"] == pytest.approx(0.5, abs=1e-6)
    assert rep["config"]["radii"] == "0.25"


def test_missing_dataset_names_field(capsys):
    assert cli.run(["lfd"]) == 2
    assert "dataset" in capsys.readouterr().err


@pytest.mark.parametrize("argv, field", [
    (["eval", "--dataset", "builtin:gaussians", "--k", "0"], "k"),
    (["eval", "--dataset", "builtin:gaussians", "--tau", "2"], "tau"),
    (["eval", "--dataset", "builtin:gaussians", "--embedding", "lda:2"], "embedding"),
    (["eval", "--dataset", "builtin:gaussians", "--classifier", "svm"], "classifier"),
    (["lfd", "--dataset", "builtin:two_point", "--radii", "-1"], "radii"),
    (["lfd", "--dataset", "builtin:two_point", "--radii", "0.1,0.2,0.3"], "radii"),
    (["lfd", "--dataset", "/no/such/file.csv"], "dataset"),
    (["sweep", "--dataset", "builtin:gaussians", "--param", "k"], "values"),
    (["verify", "--grid-step", "0.03"], "grid_step"),
])
def test_config_errors(argv, field, capsys):
    assert cli.run(argv) == 2
    assert field in capsys.readouterr().err


def test_bad_flag_is_config_error():
    assert cli.run(["lfd", "--nope"]) == 2


def test_malformed_file_line_number(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0,1\n1,0,1\n0,x,2\n")
    assert cli.run(["lfd", "--dataset", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_solver_failure_exit_code(monkeypatch):
    def boom(*a, **k):
        raise SolverError(SolverStatus.NUMERICAL_FAILURE, "forced")
    monkeypatch.setattr(cli, "solve_lfd", boom)
    assert cli.run(["lfd", "--dataset", "builtin:two_point"]) == 3


def test_classify(tmp_path):
    code, rep = run_json(["classify", "--dataset", "builtin:six_point", "--k", "1",
                          "--radii", "0", "--classifier", "drknn,knn"], tmp_path)
    assert code == 0
    jsonschema.validate(rep, SCHEMA)
    for entry in rep["result"]["classifiers"]:
        assert entry["accuracy"] == 1.0


def test_eval_rerun_from_report_is_identical(tmp_path):
    argv = ["eval", "--dataset", "builtin:gaussians", "--classifier", "drknn,knn",
            "--episodes", "3", "--queries", "40", "--radii", "cv", "--seed", "11"]
    code, first = run_json(argv, tmp_path, "a.json")
    assert code == 0
    jsonschema.validate(first, SCHEMA)
    code, second = run_json(["eval", "--config", str(tmp_path / "a.json")], tmp_path, "b.json")
    assert code == 0
    assert json.dumps(first["result"], sort_keys=True) == json.dumps(second["result"], sort_keys=True)
    assert {k: v for k, v in first["config"].items() if k != "out"} == \
        {k: v for k, v in second["config"].items() if k != "out"}


def test_flags_override_config(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"dataset": "builtin:two_point", "radii": "0.0"}))
    code, rep = run_json(["lfd", "--config", str(conf), "--radii", "0.25"], tmp_path)
    assert code == 0 and rep["result"]["objective"] == pytest.approx(1.5, abs=1e-6)
    conf.write_text(json.dumps({"dataset": "builtin:two_point", "colour": "red"}))
    assert cli.run(["lfd", "--config", str(conf)]) == 2


def test_sweep_with_table(tmp_path):
    table = tmp_path / "t.csv"
    code, rep = run_json(["sweep", "--dataset", "builtin:gaussians", "--classifier", "knn",
                          "--param", "k", "--values", "1,3", "--episodes", "2",
                          "--queries", "30", "--table", str(table)], tmp_path)
    assert code == 0
    jsonschema.validate(rep, SCHEMA)
    assert len(rep["result"]["reports"]) == 2
    assert table.read_text().count("\n") == 3


def test_verify_small(tmp_path, monkeypatch):
    # the full suite is exercised in the acceptance module; keep this one quick
    real = cli.run_checks
    monkeypatch.setattr(cli, "run_checks", lambda seed, grid: real(seed=seed, grid=grid, size=5))
    code, rep = run_json(["verify"], tmp_path)
    assert code == 0
    jsonschema.validate(rep, SCHEMA)
    assert rep["result"]["failed"] == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "drknn", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for flag in ("lfd", "classify", "eval", "sweep", "verify"):
        assert flag in res.stdout
    res = subprocess.run([sys.executable, "-m", "drknn", "eval", "--help"],
                         capture_output=True, text=True)
    for flag in ("--dataset", "--radii", "--k", "--bandwidth", "--tau", "--embedding",
                 "--episodes", "--shots", "--classes", "--queries", "--seed", "--jobs", "--out"):
        assert flag in res.stdout
