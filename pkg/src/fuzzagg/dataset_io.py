"""Schema, data, model and report files.

Schema and model files are INI-style: ``key = value`` lines grouped in
sections.  A schema has one ``[dataset]`` section followed by one section per
data-file column, in column order::

    [dataset]
    name = hepatitis
    delimiter = ,
    missing = ?
    classes = 1, 2          ; optional explicit class order
    missing_class = error   ; or drop

    [Class]
    kind = class

    [AGE]
    kind = ordinal
    membership = sigmoid    ; gaussian | sigmoid
    policy = observed-range ; explicit (with x1, x2) | upper-shoulder

Columns with ``kind = ignore`` are skipped when loading.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import os
from dataclasses import dataclass
from typing import Optional

from .errors import DataError, FormatError, LoadError, SchemaError, UsageError
from .fitter import FitReport, FittedModel, ReportRow
from .fuzzify import AttributeParams, AttributeSpec, RawDataset
from .operators import Family, OperatorClass, OperatorSpec

MODEL_FORMAT = "fuzzagg-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class SchemaFile:
    name: str
    layout: tuple  # every column of the data file, in order
    attributes: tuple  # AttributeSpec for each used column
    used: tuple  # positions of the used columns within ``layout``
    delimiter: str = ","
    missing: str = "?"
    class_order: Optional[tuple] = None
    missing_class: str = "error"


def _parser(comments: bool = False) -> configparser.ConfigParser:
    prefixes = (";", "#") if comments else None
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=prefixes)
    cp.optionxform = str
    return cp


def _split_list(text: str) -> tuple:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def parse_schema(text: str, source: str = "<schema>") -> SchemaFile:
    cp = _parser(comments=True)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise SchemaError(f"{source}: {exc}") from None
    if not cp.has_section("dataset"):
        raise SchemaError(f"{source}: missing [dataset] section")
    ds = cp["dataset"]
    delimiter = ds.get("delimiter", ",")
    delimiter = {"tab": "\t", "\\t": "\t", "space": " ", "semicolon": ";"}.get(delimiter, delimiter)
    missing_class = ds.get("missing_class", "error")
    if missing_class not in ("error", "drop"):
        raise SchemaError(f"{source}: missing_class must be 'error' or 'drop'")
    classes = ds.get("classes")

    layout, attributes, used = [], [], []
    for pos, section in enumerate(s for s in cp.sections() if s != "dataset"):
        entry = cp[section]
        layout.append(section)
        kind = entry.get("kind", "ordinal")
        if kind == "ignore":
            continue
        explicit = "x1" in entry or "x2" in entry
        try:
            attr = AttributeSpec(
                name=section,
                kind=kind,
                membership=entry.get("membership"),
                policy=entry.get("policy", "explicit" if explicit else "observed-range"),
                x1=float(entry["x1"]) if "x1" in entry else None,
                x2=float(entry["x2"]) if "x2" in entry else None,
            )
        except ValueError as exc:
            raise SchemaError(f"{source}: [{section}]: {exc}") from None
        attributes.append(attr)
        used.append(pos)
    n_class = sum(a.kind == "class" for a in attributes)
    if n_class != 1:
        raise SchemaError(f"{source}: schema needs exactly one class entry, found {n_class}")
    return SchemaFile(
        name=ds.get("name", os.path.splitext(os.path.basename(source))[0]),
        layout=tuple(layout),
        attributes=tuple(attributes),
        used=tuple(used),
        delimiter=delimiter,
        missing=ds.get("missing", "?"),
        class_order=_split_list(classes) if classes else None,
        missing_class=missing_class,
    )


def load_schema(path) -> SchemaFile:
    with open(path, encoding="utf-8") as fh:
        return parse_schema(fh.read(), str(path))


def split_row(line: str, delimiter: str) -> list:
    if delimiter == " ":
        return line.split()
    return [cell.strip() for cell in line.split(delimiter)]


def parse_cells(schema: SchemaFile, cells, path=None, line=None):
    """Turn one split row into schema-ordered cells, or None if the row is dropped."""
    if len(cells) != len(schema.layout):
        raise LoadError(f"expected {len(schema.layout)} columns, found {len(cells)}", path, line)
    row = []
    for attr, pos in zip(schema.attributes, schema.used):
        token = cells[pos]
        if attr.kind == "class":
            if token == schema.missing or token == "":
                if schema.missing_class == "drop":
                    return None
                raise LoadError(f"missing class label in column {attr.name!r}", path, line)
            if schema.class_order is not None and token not in schema.class_order:
                raise DataError(f"{path}:{line}: unknown class label {token!r}")
            row.append(token)
        elif token == schema.missing or token == "":
            row.append(None)
        else:
            try:
                row.append(float(token))
            except ValueError:
                raise LoadError(
                    f"column {attr.name!r}: cannot parse {token!r} as a number", path, line
                ) from None
    return row


def load_dataset(data_path, schema) -> RawDataset:
    """Read a delimited data file; instance order follows the file."""
    if not isinstance(schema, SchemaFile):
        schema = load_schema(schema)
    rows = []
    with open(data_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            row = parse_cells(schema, split_row(line, schema.delimiter), data_path, lineno)
            if row is not None:
                rows.append(row)
    if not rows:
        raise LoadError("no instances", data_path)
    return RawDataset(schema.attributes, rows, schema.class_order)


def count_missing(raw: RawDataset) -> int:
    return sum(v is None for row in raw.rows for v in row)


# -- models -------------------------------------------------------------------


def _num(value) -> str:
    return "none" if value is None else repr(float(value))


def _opt_float(text: str):
    return None if text == "none" else float(text)


def dumps_model(model: FittedModel) -> str:
    cp = _parser()
    cp["model"] = {
        "format": MODEL_FORMAT,
        "version": str(MODEL_VERSION),
        "family": model.spec.family.value,
        "param": _num(model.spec.param),
        "thresholds": json.dumps(list(model.thresholds)),
        "classes": json.dumps(list(model.class_labels)),
        "train_accuracy": repr(float(model.train_accuracy)),
        "correct_count": str(model.correct_count),
        "n_instances": str(model.n_instances),
        "classified_count": str(model.classified_count),
        "satisfactory": "yes" if model.satisfactory else "no",
        "sigmoid_form": model.sigmoid_form,
        "layout": json.dumps(list(model.layout)),
        "n_attributes": str(len(model.attributes)),
    }
    for i, p in enumerate(model.attributes, start=1):
        cp[f"attribute {i}"] = {
            "name": p.name,
            "kind": p.kind,
            "membership": p.membership,
            "x1": _num(p.x1),
            "x2": _num(p.x2),
            "fill": _num(p.fill),
            "low": _num(p.low),
            "high": _num(p.high),
        }
    cp["end"] = {"attributes": str(len(model.attributes))}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def loads_model(text: str, source: str = "<model>") -> FittedModel:
    cp = _parser()
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise FormatError(f"{source}: unreadable model file ({exc})") from None
    if not cp.has_section("model"):
        raise FormatError(f"{source}: not a model file")
    head = cp["model"]
    if head.get("format") != MODEL_FORMAT:
        raise FormatError(f"{source}: not a model file")
    if head.get("version") != str(MODEL_VERSION):
        raise FormatError(f"{source}: unsupported model version {head.get('version')!r}")
    if not cp.has_section("end"):
        raise FormatError(f"{source}: truncated model file")
    try:
        try:
            family = Family.parse(head["family"])
        except UsageError:
            raise FormatError(f"{source}: unknown operator family {head['family']!r}") from None
        n_attr = int(head["n_attributes"])
        if int(cp["end"]["attributes"]) != n_attr:
            raise FormatError(f"{source}: attribute count mismatch")
        attributes = []
        for i in range(1, n_attr + 1):
            sec = cp[f"attribute {i}"]
            attributes.append(
                AttributeParams(
                    name=sec["name"],
                    kind=sec["kind"],
                    membership=sec["membership"],
                    x1=float(sec["x1"]),
                    x2=float(sec["x2"]),
                    fill=_opt_float(sec["fill"]),
                    low=_opt_float(sec["low"]),
                    high=_opt_float(sec["high"]),
                )
            )
        return FittedModel(
            spec=OperatorSpec(family, _opt_float(head["param"])),
            thresholds=tuple(json.loads(head["thresholds"])),
            attributes=tuple(attributes),
            class_labels=tuple(json.loads(head["classes"])),
            train_accuracy=float(head["train_accuracy"]),
            correct_count=int(head["correct_count"]),
            n_instances=int(head["n_instances"]),
            classified_count=int(head["classified_count"]),
            satisfactory=head["satisfactory"] == "yes",
            sigmoid_form=head["sigmoid_form"],
            layout=tuple(json.loads(head["layout"])),
        )
    except FormatError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"{source}: malformed model file ({exc})") from None


def save_model(model: FittedModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read(), str(path))


# -- reports ------------------------------------------------------------------

_GROUPS = (
    (OperatorClass.TNORM, "T-norms"),
    (OperatorClass.TCONORM, "T-conorms"),
    (OperatorClass.AVERAGING, "Averaging Operator"),
)

REPORT_FIELDS = (
    "class", "operator", "family", "param", "thresholds",
    "correct", "instances", "accuracy", "satisfactory", "best",
)


def _grouped(report: FitReport):
    for tag, heading in _GROUPS:
        members = [(i, r) for i, r in enumerate(report.rows) if r.class_tag == tag.value]
        if members:
            yield heading, members


def _fmt_thresholds(ts) -> str:
    return ", ".join(f"{t:.6g}" for t in ts)


def format_report(report: FitReport, fmt: str = "table") -> str:
    if not report.rows:
        raise UsageError("cannot export an empty report")
    if fmt == "delimited":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        for i, r in enumerate(report.rows):
            writer.writerow([
                r.class_tag, r.title, r.family.value, _num(r.param),
                ";".join(repr(float(t)) for t in r.thresholds),
                r.correct_count, r.n_instances, repr(float(r.accuracy)),
                "yes" if r.satisfactory else "no", "yes" if i == report.best else "no",
            ])
        return buf.getvalue()
    if fmt != "table":
        raise UsageError(f"unknown report format {fmt!r}")
    header = ("Operator Class", "Aggregation Operator", "Param", "Threshold Point",
              "Correct Instance", "Accuracy in %")
    lines = []
    for heading, members in _grouped(report):
        for k, (i, r) in enumerate(members):
            name = ("* " if i == report.best else "  ") + r.title
            param = "-" if r.param is None else f"{r.param:g}"
            acc = f"{r.accuracy:.4f}" + ("" if r.satisfactory else "  (non-satisfactory)")
            lines.append((heading if k == 0 else "", name, param,
                          _fmt_thresholds(r.thresholds), str(r.correct_count), acc))
    widths = [max(len(row[c]) for row in [header] + lines) for c in range(len(header))]
    out = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    out.append("  ".join("-" * w for w in widths))
    for row in lines:
        out.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"


def export_report(report: FitReport, path, fmt: str = "table") -> None:
    text = format_report(report, fmt)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise FormatError(f"cannot write report to {path}: {exc}") from None


def read_report(path) -> FitReport:
    """Parse a report written with ``fmt="delimited"``."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_FIELDS:
            raise FormatError(f"{path}: not a delimited fit report")
        rows, best = [], None
        for i, rec in enumerate(reader):
            family = Family.parse(rec["family"])
            rows.append(ReportRow(
                class_tag=rec["class"],
                family=family,
                param=_opt_float(rec["param"]),
                thresholds=tuple(float(t) for t in rec["thresholds"].split(";") if t),
                correct_count=int(rec["correct"]),
                n_instances=int(rec["instances"]),
                accuracy=float(rec["accuracy"]),
                satisfactory=rec["satisfactory"] == "yes",
            ))
            if rec["best"] == "yes":
                best = i
    return FitReport(tuple(rows), best)
