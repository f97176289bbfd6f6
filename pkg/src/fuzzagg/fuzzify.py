"""Turn a raw labelled table into membership degrees plus an encoded class target.

The preprocessing runs in a fixed order: move the class column last, map
binary nominal columns to {0, 1}, impute missing cells with column means, then
push every input column through its Gaussian or sigmoid membership function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, DegenerateAttributeError, SchemaError, UsageError

EPS = 1e-6

KINDS = ("nominal", "ordinal", "class")
MEMBERSHIPS = ("gaussian", "sigmoid")
POLICIES = ("observed-range", "explicit", "upper-shoulder")
SIGMOID_FORMS = ("corrected", "literal")


@dataclass(frozen=True)
class AttributeSpec:
    """One schema column.

    ``policy`` decides where the membership function's support (x1, x2) comes
    from: the observed min/max, explicit values, or ``upper-shoulder``, a
    Gaussian whose peak sits one unit above the observed maximum with a
    standard deviation equal to the observed range, so the data occupies the
    rising flank only.
    """

    name: str
    kind: str
    membership: Optional[str] = None
    policy: str = "observed-range"
    x1: Optional[float] = None
    x2: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        membership = self.membership
        if membership is None and self.kind != "class":
            membership = "sigmoid"
            object.__setattr__(self, "membership", membership)
        if self.kind != "class" and membership not in MEMBERSHIPS:
            raise SchemaError(
                f"attribute {self.name!r}: unknown membership {membership!r}"
            )
        if self.policy not in POLICIES:
            raise SchemaError(f"attribute {self.name!r}: unknown policy {self.policy!r}")
        if self.policy == "explicit":
            if self.x1 is None or self.x2 is None or not self.x1 < self.x2:
                raise SchemaError(f"attribute {self.name!r}: explicit policy needs x1 < x2")


@dataclass(frozen=True)
class RawDataset:
    """Rows hold floats for input cells, None for missing ones, str for the class."""

    schema: tuple
    rows: list
    class_order: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "schema", tuple(self.schema))
        width = len(self.schema)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise DataError(f"row {i} has {len(row)} cells, schema has {width}")

    @property
    def class_position(self) -> int:
        hits = [i for i, a in enumerate(self.schema) if a.kind == "class"]
        if len(hits) != 1:
            raise SchemaError(f"schema needs exactly one class attribute, found {len(hits)}")
        return hits[0]

    def column(self, j: int) -> list:
        return [row[j] for row in self.rows]

    def _with_rows(self, rows, schema=None):
        return RawDataset(self.schema if schema is None else schema, rows, self.class_order)


@dataclass(frozen=True)
class AttributeParams:
    """Fitted fuzzification of one input attribute.

    ``fill`` is the training-time imputation value; ``low``/``high`` are the raw
    values a nominal column mapped to 0 and 1.
    """

    name: str
    kind: str
    membership: str
    x1: float
    x2: float
    fill: Optional[float] = None
    low: Optional[float] = None
    high: Optional[float] = None


@dataclass
class FuzzifiedDataset:
    inputs: np.ndarray
    targets: np.ndarray
    class_index: np.ndarray
    class_labels: tuple
    attributes: tuple = field(default_factory=tuple)
    sigmoid_form: str = "corrected"

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        self.class_index = np.asarray(self.class_index, dtype=int)
        self.class_labels = tuple(self.class_labels)
        if self.inputs.ndim != 2:
            raise UsageError("inputs must be a 2-D membership matrix")
        n = self.inputs.shape[0]
        if self.targets.shape != (n,) or self.class_index.shape != (n,):
            raise UsageError("targets and class indices must have one entry per instance")

    @property
    def n_instances(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def labels(self) -> list:
        return [self.class_labels[k] for k in self.class_index]

    @classmethod
    def from_arrays(cls, inputs, class_index, class_labels=None) -> "FuzzifiedDataset":
        """Build a dataset directly from memberships and 0-based class indices."""
        class_index = np.asarray(class_index, dtype=int)
        if class_labels is None:
            class_labels = tuple(str(k + 1) for k in range(int(class_index.max()) + 1))
        k = len(class_labels)
        targets = (class_index + 1) / (k + 1)
        return cls(np.asarray(inputs, dtype=float), targets, class_index, class_labels)


# -- Step 1-3 ---------------------------------------------------------------


def reorder_class_last(raw: RawDataset) -> RawDataset:
    c = raw.class_position
    order = [j for j in range(len(raw.schema)) if j != c] + [c]
    schema = tuple(raw.schema[j] for j in order)
    rows = [[row[j] for j in order] for row in raw.rows]
    return raw._with_rows(rows, schema)


def nominal_levels(raw: RawDataset) -> dict:
    """Map each nominal column index to its (lowest, highest) observed value."""
    levels = {}
    for j, attr in enumerate(raw.schema):
        if attr.kind != "nominal":
            continue
        distinct = sorted({v for v in raw.column(j) if v is not None})
        if len(distinct) > 2:
            raise SchemaError(
                f"nominal attribute {attr.name!r} has {len(distinct)} distinct values; "
                "only binary nominal columns can be encoded"
            )
        if distinct:
            levels[j] = (distinct[0], distinct[-1])
    return levels


def encode_nominal(raw: RawDataset) -> RawDataset:
    """Replace the highest value of every nominal column by 1 and the lowest by 0."""
    levels = nominal_levels(raw)
    rows = [list(row) for row in raw.rows]
    for j, (low, high) in levels.items():
        for row in rows:
            if row[j] is not None:
                row[j] = 1.0 if (row[j] == high and high != low) else 0.0
    return raw._with_rows(rows)


def _round_half_up(x: float) -> float:
    return float(math.floor(x + 0.5))


def fill_values(raw: RawDataset) -> dict:
    """Imputation value per input column: the mean, rounded to 0/1 for nominal columns."""
    fills = {}
    for j, attr in enumerate(raw.schema):
        if attr.kind == "class":
            continue
        present = [v for v in raw.column(j) if v is not None]
        if not present:
            raise DataError(f"attribute {attr.name!r} has no observed values")
        mean = math.fsum(present) / len(present)
        fills[j] = _round_half_up(mean) if attr.kind == "nominal" else mean
    return fills


def impute_missing(raw: RawDataset) -> RawDataset:
    fills = fill_values(raw)
    c = raw.class_position
    rows = []
    for i, row in enumerate(raw.rows):
        if row[c] is None:
            raise DataError(f"instance {i} has no class label")
        rows.append([fills[j] if (v is None and j != c) else v for j, v in enumerate(row)])
    return raw._with_rows(rows)


# -- membership ---------------------------------------------------------------


def compute_center_width(column: Sequence[float]) -> tuple:
    """Observed (min, max) support of a column."""
    values = [v for v in column if v is not None]
    if not values:
        raise DegenerateAttributeError("cannot size an empty column")
    x1, x2 = float(min(values)), float(max(values))
    if not x1 < x2:
        raise DegenerateAttributeError(f"constant column (all values {x1:g})")
    return x1, x2


def support_for(attr: AttributeSpec, column: Sequence[float]) -> tuple:
    if attr.policy == "explicit":
        return float(attr.x1), float(attr.x2)
    try:
        lo, hi = compute_center_width(column)
    except DegenerateAttributeError as exc:
        raise DegenerateAttributeError(f"attribute {attr.name!r}: {exc}") from None
    if attr.policy == "upper-shoulder":
        width = hi - lo
        return hi + 1.0 - 4.0 * width, hi + 1.0 + 4.0 * width
    return lo, hi


def _clamp(v):
    out = np.clip(v, EPS, 1.0 - EPS)
    return float(out) if np.ndim(out) == 0 else out


def membership_gaussian(x, x1: float, x2: float):
    if not x1 < x2:
        raise UsageError("gaussian membership needs x1 < x2")
    y = 8.0 * (np.asarray(x, dtype=float) - x1) / (x2 - x1) - 4.0
    return _clamp(np.exp(-0.5 * y * y))


def membership_sigmoid(x, x1: float, x2: float, form: str = "corrected"):
    """Sigmoid over [x1, x2].  ``literal`` keeps the +6 offset, which saturates near 1."""
    if not x1 < x2:
        raise UsageError("sigmoid membership needs x1 < x2")
    if form not in SIGMOID_FORMS:
        raise UsageError(f"unknown sigmoid form {form!r}")
    y = 12.0 * (np.asarray(x, dtype=float) - x1) / (x2 - x1)
    shift = -6.0 if form == "corrected" else 6.0
    with np.errstate(over="ignore"):
        return _clamp(1.0 / (1.0 + np.exp(-(y + shift))))


def membership(kind: str, x, x1: float, x2: float, sigmoid_form: str = "corrected"):
    if kind == "gaussian":
        return membership_gaussian(x, x1, x2)
    if kind == "sigmoid":
        return membership_sigmoid(x, x1, x2, sigmoid_form)
    raise UsageError(f"unknown membership {kind!r}")


# -- class target -------------------------------------------------------------


def sort_labels(labels) -> tuple:
    """Distinct labels ascending: numerically when every label parses as a number."""
    distinct = set(labels)
    try:
        return tuple(sorted(distinct, key=float))
    except ValueError:
        return tuple(sorted(distinct))


def encode_class(label, class_labels: Sequence) -> float:
    class_labels = list(class_labels)
    try:
        k = class_labels.index(label)
    except ValueError:
        raise DataError(f"unknown class label {label!r}") from None
    return (k + 1) / (len(class_labels) + 1)


def fuzzify_dataset(raw: RawDataset, sigmoid_form: str = "corrected") -> FuzzifiedDataset:
    """Map a cleaned dataset (class last, no missing cells) to memberships."""
    c = raw.class_position
    if c != len(raw.schema) - 1:
        raise UsageError("class attribute must be last; run reorder_class_last first")
    labels = raw.column(c)
    if raw.class_order is not None:
        class_labels = tuple(raw.class_order)
        unknown = set(labels) - set(class_labels)
        if unknown:
            raise DataError(f"unknown class label(s) {sorted(unknown)}")
    else:
        class_labels = sort_labels(labels)
    index = {lab: k for k, lab in enumerate(class_labels)}
    class_index = np.array([index[lab] for lab in labels], dtype=int)
    targets = (class_index + 1) / (len(class_labels) + 1)

    columns, params = [], []
    for j, attr in enumerate(raw.schema[:-1]):
        col = raw.column(j)
        if any(v is None for v in col):
            raise UsageError(f"attribute {attr.name!r} still has missing cells")
        x1, x2 = support_for(attr, col)
        columns.append(membership(attr.membership, np.array(col, dtype=float), x1, x2, sigmoid_form))
        params.append(AttributeParams(attr.name, attr.kind, attr.membership, x1, x2))
    inputs = np.column_stack(columns) if columns else np.empty((len(raw.rows), 0))
    return FuzzifiedDataset(inputs, targets, class_index, class_labels, tuple(params), sigmoid_form)


def prepare(raw: RawDataset, sigmoid_form: str = "corrected") -> FuzzifiedDataset:
    """Run reorder, nominal encoding, imputation and fuzzification in order.

    The returned attribute parameters carry everything needed to fuzzify a
    new raw instance the same way (see :func:`fuzzify_instance`).
    """
    ordered = reorder_class_last(raw)
    levels = nominal_levels(ordered)
    encoded = encode_nominal(ordered)
    fills = fill_values(encoded)
    data = fuzzify_dataset(impute_missing(encoded), sigmoid_form)
    params = []
    for j, p in enumerate(data.attributes):
        low, high = levels.get(j, (None, None))
        params.append(replace(p, fill=fills[j], low=low, high=high))
    data.attributes = tuple(params)
    return data


def fuzzify_instance(attributes: Sequence[AttributeParams], values: Sequence, sigmoid_form="corrected") -> np.ndarray:
    """Fuzzify one raw instance (input attributes only, None for missing).

    Nominal values snap to the nearer of the two training levels, missing cells
    take the training fill value, and every value is clamped into [x1, x2].
    """
    if len(values) != len(attributes):
        raise UsageError(f"instance has {len(values)} values, model expects {len(attributes)}")
    out = np.empty(len(attributes))
    for j, (p, v) in enumerate(zip(attributes, values)):
        if v is None:
            v = p.fill
        elif p.kind == "nominal" and p.low is not None:
            v = 1.0 if (p.high != p.low and abs(v - p.high) < abs(v - p.low)) else 0.0
        if v is None:
            raise DataError(f"attribute {p.name!r} is missing and has no fill value")
        v = min(max(float(v), p.x1), p.x2)
        out[j] = membership(p.membership, v, p.x1, p.x2, sigmoid_form)
    return out
