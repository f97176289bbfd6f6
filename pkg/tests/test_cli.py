import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import paths
from fuzzagg import cli
from fuzzagg.dataset_io import load_model
from fuzzagg.operators import Family, aggregate_rows


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def fit_toy(capsys, tmp_path, *extra):
    data, schema = paths("toy")
    model = tmp_path / "toy.model"
    code, out, err = run(capsys, "fit", "--data", data, "--schema", schema, "--model", model, *extra)
    return code, out, err, model


def test_fit_toy(capsys, tmp_path):
    code, out, err, model = fit_toy(capsys, tmp_path)
    assert code == 0, err
    assert "accuracy: 100.0000% (4/4)" in out
    assert load_model(model).train_accuracy == 1.0


def test_fit_toy_deterministic(capsys, tmp_path):
    first = fit_toy(capsys, tmp_path)
    text = first[3].read_text()
    second = fit_toy(capsys, tmp_path)
    assert first[1] == second[1] and second[3].read_text() == text


def test_fit_breast_cancer_report(capsys, tmp_path):
    data, schema = paths("breast-cancer-wisconsin")
    report = tmp_path / "r.csv"
    code, out, err = run(capsys, "fit", "--data", data, "--schema", schema, "--model", tmp_path / "m",
                         "--format", "delimited", "--report", report)
    assert code == 0, err
    rows = [ln for ln in report.read_text().splitlines()[1:] if ln]
    assert len(rows) == 14
    assert sum(ln.endswith(",yes") for ln in rows) == 1
    assert out.startswith(report.read_text())


def test_steps_two_is_coarser(capsys, tmp_path):
    data, schema = paths("echocardiogram")
    args = ["report", "--data", data, "--schema", schema, "--format", "delimited", "--families", "AlgebraicSum"]
    code, coarse, _ = run(capsys, *args, "--steps", "2")
    assert code == 0
    code, fine, _ = run(capsys, *args)
    assert coarse != fine
    assert int(coarse.splitlines()[1].split(",")[5]) <= int(fine.splitlines()[1].split(",")[5])


def test_steps_below_two(capsys, tmp_path):
    code, _, err, _ = fit_toy(capsys, tmp_path, "--steps", "1")
    assert code == 2 and "steps" in err


def test_grid_override_and_families(capsys, tmp_path):
    code, out, err, model = fit_toy(capsys, tmp_path, "--families", "hamacher-product,min",
                                    "--grid", "HamacherProduct=3")
    assert code == 0, err
    assert "Hamacher Product" in out and "Einstein" not in out
    assert load_model(model).spec.family is Family.HamacherProduct
    assert load_model(model).spec.param == 3.0


def test_bad_grid(capsys, tmp_path):
    code, _, err, _ = fit_toy(capsys, tmp_path, "--grid", "HamacherProduct=-4")
    assert code == 1 and "outside the valid range" in err
    code, _, err, _ = fit_toy(capsys, tmp_path, "--grid", "oops")
    assert code == 1 and "usage error" in err


def test_pipeline_error_names_stage(capsys, tmp_path):
    data = tmp_path / "bad.data"
    data.write_text("1,1\n2\n")
    _, schema = paths("toy")
    code, _, err = run(capsys, "report", "--data", data, "--schema", schema)
    assert code == 1
    assert err.startswith("fuzzagg: load error:") and "bad.data:2" in err
    assert len(err.strip().splitlines()) == 1


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "report", "--data", tmp_path / "none.data", "--schema", paths("toy")[1])
    assert code == 1 and "io error" in err


def test_classify_toy(capsys, tmp_path):
    *_, model = fit_toy(capsys, tmp_path)
    assert run(capsys, "classify", "--model", model, "--values", "1.5")[1].strip() == "1"
    assert run(capsys, "classify", "--model", model, "--values", "8.5,2")[1].strip() == "2"
    # far outside the training range clamps to the support
    assert run(capsys, "classify", "--model", model, "--values", "1000")[1].strip() == "2"
    assert run(capsys, "classify", "--model", model, "--values", "-1000")[1].strip() == "1"
    # missing takes the training mean 5, whose membership 0.5 sits exactly on
    # the threshold and so belongs to the lower class
    assert run(capsys, "classify", "--model", model, "--values", "?")[1].strip() == "1"


def test_classify_width_mismatch(capsys, tmp_path):
    *_, model = fit_toy(capsys, tmp_path)
    code, _, err = run(capsys, "classify", "--model", model, "--values", "1,2,3")
    assert code == 1 and "usage error" in err


def test_classify_replays_training(capsys, tmp_path):
    data, schema = paths("breast-cancer-wisconsin")
    model = tmp_path / "bcw.model"
    assert run(capsys, "fit", "--data", data, "--schema", schema, "--model", model)[0] == 0
    code, out, err = run(capsys, "classify", "--model", model, "--data", data, "--schema", schema)
    assert code == 0, err
    predicted = out.split()
    labels = [ln.strip().split(",")[-1] for ln in data.read_text().splitlines() if ln.strip()]
    m = load_model(model)
    assert len(predicted) == 699
    assert sum(p == t for p, t in zip(predicted, labels)) == m.correct_count


def test_validate_passes(capsys):
    code, out, err = run(capsys, "validate", "--samples", "200")
    assert code == 0, err
    assert "0 failed" in out


def faulty_evaluator(spec, matrix):
    out = aggregate_rows(spec, matrix)
    if spec.family is Family.EinsteinSum:
        return np.minimum(out, np.asarray(matrix).max(axis=1) - 0.01)
    return out


def test_validate_reports_injected_fault(capsys):
    args = cli.build_parser().parse_args(["validate", "--samples", "100"])
    code = cli.cmd_validate(args, evaluator=faulty_evaluator)
    out, err = capsys.readouterr()
    assert code == 1
    assert "ordering" in err
    assert "FAIL  ordering" in out and "EinsteinSum" in out


def test_validate_ten_thousand_samples_under_ten_seconds(capsys):
    start = time.perf_counter()
    code, _, _ = run(capsys, "validate", "--samples", "10000")
    assert code == 0
    assert time.perf_counter() - start < 10


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fuzzagg", "validate", "--samples", "50"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_seed_changes_nothing_on_pass(capsys):
    assert run(capsys, "validate", "--samples", "100", "--seed", "7")[0] == 0
