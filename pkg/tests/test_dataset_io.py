import dataclasses

import numpy as np
import pytest

from conftest import NAMES, fitted, paths
from fuzzagg.dataset_io import (
    count_missing,
    dumps_model,
    export_report,
    format_report,
    load_dataset,
    load_model,
    loads_model,
    parse_schema,
    read_report,
    save_model,
)
from fuzzagg.errors import DataError, FormatError, LoadError, SchemaError, UsageError
from fuzzagg.fitter import FitReport, classify, evaluate
from fuzzagg.fuzzify import fuzzify_instance

SMALL = """
[dataset]
name = small
missing = ?
classes = a, b

[id]
kind = ignore

[x]
kind = ordinal

[flag]
kind = nominal

[label]
kind = class
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- loading --------------------------------------------------------------------


def test_breast_cancer_counts():
    raw = load_dataset(*paths("breast-cancer-wisconsin"))
    assert len(raw.rows) == 699
    assert len(raw.schema) == 10  # 11 columns, sample id ignored
    assert count_missing(raw) == 16
    assert sum(any(v is None for v in row) for row in raw.rows) == 16


def test_lymphography_counts():
    raw = load_dataset(*paths("lymphography"))
    assert len(raw.rows) == 148
    assert count_missing(raw) == 0


def test_hepatitis_and_echo_counts():
    assert len(load_dataset(*paths("hepatitis")).rows) == 155
    # one echocardiogram instance has no class label and is dropped
    assert len(load_dataset(*paths("echocardiogram")).rows) == 131


def test_load_preserves_order(tmp_path):
    schema = write(tmp_path, "s.schema", SMALL)
    data = write(tmp_path, "d.data", "1,5,0,b\n2,?,1,a\n3,7,1,b\n")
    raw = load_dataset(data, schema)
    assert raw.rows == [[5.0, 0.0, "b"], [None, 1.0, "a"], [7.0, 1.0, "b"]]
    assert load_dataset(data, schema).rows == raw.rows


def test_wrong_width_names_line(tmp_path):
    schema = write(tmp_path, "s.schema", SMALL)
    data = write(tmp_path, "d.data", "1,5,0,b\n2,6,1\n")
    with pytest.raises(LoadError, match=r"d\.data:2:"):
        load_dataset(data, schema)


def test_unparseable_number(tmp_path):
    schema = write(tmp_path, "s.schema", SMALL)
    data = write(tmp_path, "d.data", "1,5,0,b\n\n2,six,1,a\n")
    with pytest.raises(LoadError, match=r":3:.*six"):
        load_dataset(data, schema)


def test_unknown_class(tmp_path):
    schema = write(tmp_path, "s.schema", SMALL)
    data = write(tmp_path, "d.data", "1,5,0,c\n")
    with pytest.raises(DataError):
        load_dataset(data, schema)


def test_schema_errors():
    with pytest.raises(SchemaError):
        parse_schema("[x]\nkind = class\n")
    with pytest.raises(SchemaError):
        parse_schema("[dataset]\n[x]\nkind = ordinal\n")
    with pytest.raises(SchemaError):
        parse_schema("[dataset]\n[x]\nkind = colour\n[y]\nkind = class\n")
    with pytest.raises(SchemaError):
        parse_schema("[dataset]\n[x]\nx1 = 3\nx2 = 1\n[y]\nkind = class\n")


def test_schema_explicit_support():
    s = parse_schema("[dataset]\ndelimiter = tab\n[x]\nx1 = 0\nx2 = 10\nmembership = gaussian\n[y]\nkind = class\n")
    assert s.delimiter == "\t"
    assert s.attributes[0].policy == "explicit" and s.attributes[0].x2 == 10.0


# -- models ---------------------------------------------------------------------


@pytest.mark.parametrize("name", NAMES)
def test_model_round_trip(tmp_path, name):
    result = fitted(name)
    path = tmp_path / "m.model"
    for m in result.models:
        save_model(m, path)
        loaded = load_model(path)
        assert loaded == m
        counts, acc = evaluate(loaded, result.data)
        assert acc == m.train_accuracy


def test_round_trip_classify_bit_identical(tmp_path):
    result = fitted("lymphography")
    path = tmp_path / "m.model"
    save_model(result.best, path)
    loaded = load_model(path)
    rng = np.random.default_rng(2)
    for _ in range(50):
        xs = rng.uniform(0.01, 0.99, size=len(loaded.attributes))
        assert classify(loaded, xs) == classify(result.best, xs)
    values = [float(v) for v in result.raw.rows[0][1:]]
    assert fuzzify_instance(loaded.attributes, values).tobytes() == \
        fuzzify_instance(result.best.attributes, values).tobytes()


def test_unknown_family():
    text = dumps_model(fitted("hepatitis").best)
    family = fitted("hepatitis").best.spec.family.value
    with pytest.raises(FormatError):
        loads_model(text.replace(f"family = {family}", "family = Quaternion"))


def test_version_mismatch():
    text = dumps_model(fitted("hepatitis").best)
    with pytest.raises(FormatError, match="version"):
        loads_model(text.replace("version = 1", "version = 2"))


def test_truncated_file():
    text = dumps_model(fitted("hepatitis").best)
    with pytest.raises(FormatError):
        loads_model(text[: len(text) // 2])
    with pytest.raises(FormatError):
        loads_model(text[: text.index("[end]")])


def test_not_a_model():
    with pytest.raises(FormatError):
        loads_model("hello world\n")


def test_round_trip_multiclass_and_flags():
    m = dataclasses.replace(fitted("lymphography").best, satisfactory=False, sigmoid_form="literal")
    assert loads_model(dumps_model(m)) == m


# -- reports --------------------------------------------------------------------


def test_table_has_fourteen_rows_under_three_headings():
    text = format_report(fitted("breast-cancer-wisconsin").report)
    lines = text.splitlines()[2:]
    assert len(lines) == 14
    headings = [ln[:18].strip() for ln in lines if ln[:18].strip()]
    assert headings == ["T-norms", "T-conorms", "Averaging Operator"]
    assert sum("* " in ln for ln in lines) == 1


def test_non_satisfactory_rows_are_marked():
    text = format_report(fitted("lymphography").report)
    flagged = [r for r in fitted("lymphography").report.rows if not r.satisfactory]
    assert text.count("(non-satisfactory)") == len(flagged)


def test_empty_report():
    with pytest.raises(UsageError):
        format_report(FitReport((), None))


def test_delimited_round_trip(tmp_path):
    report = fitted("lymphography").report
    path = tmp_path / "report.csv"
    export_report(report, path, "delimited")
    assert read_report(path) == report


def test_export_failure(tmp_path):
    with pytest.raises(FormatError):
        export_report(fitted("hepatitis").report, tmp_path / "missing-dir" / "r.txt")
