"""End-to-end runs: load, fuzzify, fit every operator, pick the best one."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .dataset_io import SchemaFile, load_dataset, load_schema
from .errors import UsageError
from .fitter import FitConfig, FitReport, FittedModel, classify, fit_all, select_operator
from .fuzzify import FuzzifiedDataset, RawDataset, fuzzify_instance, prepare
from .operators import DEFAULT_ROSTER


@dataclass
class FitResult:
    raw: RawDataset
    data: FuzzifiedDataset
    models: list
    best: FittedModel
    report: FitReport


def fit_dataset(data_path, schema, config: Optional[FitConfig] = None,
                sigmoid_form: str = "corrected", families=DEFAULT_ROSTER) -> FitResult:
    if not isinstance(schema, SchemaFile):
        schema = load_schema(schema)
    raw = load_dataset(data_path, schema)
    data = prepare(raw, sigmoid_form)
    models = [replace(m, layout=schema.layout) for m in fit_all(data, config, families)]
    best = select_operator(models)
    return FitResult(raw, data, models, best, FitReport.from_models(models, best))


def instance_values(model: FittedModel, cells: Sequence[str], missing: str = "?") -> list:
    """Pick a model's input values out of a raw row.

    ``cells`` is either a full data-file row (same layout as training, class
    cell ignored) or just the input attributes in training order.
    """
    names = [p.name for p in model.attributes]
    if model.layout and len(cells) == len(model.layout):
        pos = {name: i for i, name in enumerate(model.layout)}
        cells = [cells[pos[n]] for n in names]
    elif len(cells) != len(names):
        expected = f"{len(names)}" + (f" or {len(model.layout)}" if model.layout else "")
        raise UsageError(f"instance has {len(cells)} values, expected {expected}")
    values = []
    for name, token in zip(names, cells):
        token = token.strip()
        if token in (missing, ""):
            values.append(None)
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise UsageError(f"attribute {name!r}: cannot parse {token!r}") from None
    return values


def classify_raw(model: FittedModel, cells: Sequence[str], missing: str = "?") -> str:
    memberships = fuzzify_instance(model.attributes, instance_values(model, cells, missing), model.sigmoid_form)
    return classify(model, memberships)

