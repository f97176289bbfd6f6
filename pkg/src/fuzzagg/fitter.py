"""Fit aggregation operators to labelled memberships with a threshold sweep.

For every parameter value of a family the instances are aggregated to one
score each.  Between every pair of adjacent classes a threshold is swept
upward over a regular grid and the grid point with the fewest mismatches is
kept; an instance counts as lower-class when its score is <= the threshold.
The parameter whose thresholds give the best training accuracy wins, and the
best operator overall is chosen by accuracy with a deterministic tie-break.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DataError, ParameterError, UsageError
from .fuzzify import FuzzifiedDataset
from .operators import (
    DEFAULT_ROSTER,
    FAMILY_INFO,
    ROSTER,
    Family,
    OperatorSpec,
    aggregate_rows,
    is_parametrized,
)

_TENTHS = tuple(k / 10 for k in range(11))

DEFAULT_PARAM_GRIDS = {
    Family.HamacherProduct: tuple(float(g) for g in range(11)),
    Family.HamacherSum: tuple(float(g) for g in range(11)),
    Family.DombiIntersection: (0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0),
    Family.DombiUnion: (0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0),
    Family.DuboisUnion: _TENTHS,
    Family.FuzzyAnd: _TENTHS,
    Family.FuzzyOr: _TENTHS,
    Family.ConvexMin: _TENTHS,
    Family.ConvexMax: _TENTHS,
}

BOUNDS_POLICIES = ("overlap-region", "full-range")

# Sorting pairwise thresholds may cost accuracy; beyond this the fit is flagged.
NON_SATISFACTORY_DROP = 0.05


@dataclass(frozen=True)
class FitConfig:
    step_count: int = 1000
    param_grid: Mapping = field(default_factory=dict)
    sweep_bounds_policy: str = "overlap-region"
    workers: int = 1

    def __post_init__(self):
        if int(self.step_count) != self.step_count or self.step_count < 2:
            raise UsageError("step_count must be an integer >= 2")
        if self.sweep_bounds_policy not in BOUNDS_POLICIES:
            raise UsageError(f"unknown sweep bounds policy {self.sweep_bounds_policy!r}")
        grids = {}
        for fam, values in self.param_grid.items():
            fam = Family.parse(fam) if isinstance(fam, str) else Family(fam)
            if not is_parametrized(fam):
                raise ParameterError(f"{fam.value} has no parameter to grid over")
            values = tuple(float(v) for v in values)
            if not values:
                raise ParameterError(f"empty parameter grid for {fam.value}")
            for v in values:
                OperatorSpec(fam, v)
            grids[fam] = values
        object.__setattr__(self, "param_grid", grids)

    def grid_for(self, family: Family) -> tuple:
        if not is_parametrized(family):
            return (None,)
        return self.param_grid.get(family, DEFAULT_PARAM_GRIDS[family])


@dataclass(frozen=True)
class MatchCounts:
    ok: int
    nok: int

    @property
    def total(self) -> int:
        return self.ok + self.nok


@dataclass(frozen=True)
class FittedModel:
    spec: OperatorSpec
    thresholds: tuple
    attributes: tuple
    class_labels: tuple
    train_accuracy: float
    correct_count: int
    n_instances: int
    classified_count: int = 0
    satisfactory: bool = True
    sigmoid_form: str = "corrected"
    layout: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        if len(self.thresholds) != len(self.class_labels) - 1:
            raise UsageError("a model over K classes needs K-1 thresholds")
        if any(b < a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise UsageError("thresholds must be ascending")


@dataclass(frozen=True)
class ReportRow:
    class_tag: str
    family: Family
    param: Optional[float]
    thresholds: tuple
    correct_count: int
    n_instances: int
    accuracy: float  # percent
    satisfactory: bool = True

    @property
    def title(self) -> str:
        return FAMILY_INFO[self.family].title


@dataclass(frozen=True)
class FitReport:
    rows: tuple
    best: Optional[int] = None  # index into rows

    @classmethod
    def from_models(cls, models: Sequence[FittedModel], best: Optional[FittedModel] = None):
        rows = tuple(
            ReportRow(
                m.spec.operator_class.value,
                m.spec.family,
                m.spec.param,
                m.thresholds,
                m.correct_count,
                m.n_instances,
                100.0 * m.train_accuracy,
                m.satisfactory,
            )
            for m in models
        )
        index = None
        if best is not None:
            index = next(i for i, m in enumerate(models) if m is best)
        return cls(rows, index)


# -- threshold sweep ------------------------------------------------------------


def threshold_grid(bounds, step_size: float) -> np.ndarray:
    """Grid m_point, m_point + step, ... up to and including compare."""
    m_point, compare = float(bounds[0]), float(bounds[1])
    if not step_size > 0:
        raise UsageError("step_size must be positive")
    if m_point > compare:
        raise UsageError("sweep bounds must satisfy m_point <= compare")
    n = int(math.floor((compare - m_point) / step_size + 1e-9))
    return m_point + step_size * np.arange(n + 1)


def sweep_threshold(values, is_lower_class, bounds, step_size: float):
    """Return the first grid threshold with the fewest mismatches, and its counts."""
    values = np.asarray(values, dtype=float)
    is_lower = np.asarray(is_lower_class, dtype=bool)
    if values.size == 0:
        raise UsageError("cannot sweep a threshold over no instances")
    if values.shape != is_lower.shape:
        raise UsageError("values and class flags differ in length")
    grid = threshold_grid(bounds, step_size)
    lower = np.sort(values[is_lower])
    upper = np.sort(values[~is_lower])
    # lower-class instances above t and upper-class instances at or below t
    nok = (lower.size - np.searchsorted(lower, grid, side="right")) + np.searchsorted(
        upper, grid, side="right"
    )
    i = int(np.argmin(nok))
    return float(grid[i]), MatchCounts(int(values.size - nok[i]), int(nok[i]))


def brute_force_threshold_oracle(values, flags, grid):
    """Exhaustive reference for :func:`sweep_threshold` on an explicit grid."""
    grid = list(grid)
    if not grid:
        raise UsageError("empty threshold grid")
    best_t, best_nok = None, None
    for t in grid:
        nok = 0
        for v, low in zip(values, flags):
            correct = (v <= t) if low else (v > t)
            nok += 0 if correct else 1
        if best_nok is None or nok < best_nok:
            best_t, best_nok = t, nok
    return best_t, best_nok


def sweep_bounds(values, is_lower, policy: str = "overlap-region") -> tuple:
    """Bounds (m_point, compare) of the threshold sweep for one class pair.

    With the overlap policy the sweep covers [min upper-class score, max
    lower-class score].  Separable pairs collapse to the midpoint of the gap.
    """
    values = np.asarray(values, dtype=float)
    is_lower = np.asarray(is_lower, dtype=bool)
    if policy == "full-range":
        return float(values.min()), float(values.max())
    m_point = float(values[~is_lower].min())
    compare = float(values[is_lower].max())
    if m_point <= compare:
        return m_point, compare
    mid = compare + 0.5 * (m_point - compare)
    return mid, mid


def aggregate_column(spec: OperatorSpec, data: FuzzifiedDataset) -> np.ndarray:
    if data.n_instances == 0:
        raise UsageError("dataset has no instances")
    return aggregate_rows(spec, data.inputs)


def classify_values(thresholds: Sequence[float], values) -> np.ndarray:
    """0-based class index of each score: class k covers (t_{k-1}, t_k]."""
    return np.searchsorted(np.asarray(thresholds, dtype=float), np.asarray(values, dtype=float), side="left")


def _fit_thresholds(values, class_index, n_classes, config):
    thresholds, pair_counts, regions = [], [], []
    for k in range(n_classes - 1):
        mask = (class_index == k) | (class_index == k + 1)
        v, lower = values[mask], class_index[mask] == k
        if lower.all() or not lower.any():
            raise DataError(f"classes {k + 1} and {k + 2} need instances on both sides")
        bounds = sweep_bounds(v, lower, config.sweep_bounds_policy)
        width = bounds[1] - bounds[0]
        step = width / config.step_count if width > 0 else 1.0
        t, counts = sweep_threshold(v, lower, bounds, step)
        thresholds.append(t)
        pair_counts.append(counts)
        m_point, compare = float(v[~lower].min()), float(v[lower].max())
        if m_point <= compare:
            regions.append((m_point, compare))
    return thresholds, pair_counts, regions


def _unambiguous_count(values, regions) -> int:
    ambiguous = np.zeros(values.shape, dtype=bool)
    for lo, hi in regions:
        ambiguous |= (values >= lo) & (values <= hi)
    return int(values.size - ambiguous.sum())


def fit_operator(family, data: FuzzifiedDataset, config: Optional[FitConfig] = None) -> FittedModel:
    family = Family.parse(family) if isinstance(family, str) else Family(family)
    config = config or FitConfig()
    n_classes = len(data.class_labels)
    if n_classes < 2:
        raise DataError("fitting needs at least two classes")
    best, best_key = None, None
    for param in config.grid_for(family):
        spec = OperatorSpec(family, param)
        values = aggregate_column(spec, data)
        raw, pair_counts, regions = _fit_thresholds(values, data.class_index, n_classes, config)
        thresholds = sorted(raw)
        correct = int(np.sum(classify_values(thresholds, values) == data.class_index))
        accuracy = correct / data.n_instances
        pairwise = sum(c.ok for c in pair_counts) / sum(c.total for c in pair_counts)
        reordered = thresholds != raw or any(b <= a for a, b in zip(thresholds, thresholds[1:]))
        satisfactory = not (reordered and pairwise - accuracy > NON_SATISFACTORY_DROP)
        key = (satisfactory, correct)
        if best_key is None or key > best_key:
            best_key = key
            best = FittedModel(
                spec=spec,
                thresholds=tuple(thresholds),
                attributes=data.attributes,
                class_labels=data.class_labels,
                train_accuracy=accuracy,
                correct_count=correct,
                n_instances=data.n_instances,
                classified_count=_unambiguous_count(values, regions),
                satisfactory=satisfactory,
                sigmoid_form=data.sigmoid_form,
            )
    return best


def fit_all(data: FuzzifiedDataset, config: Optional[FitConfig] = None, families=DEFAULT_ROSTER) -> list:
    """Fit every family; results keep the order of ``families`` whatever ``workers`` is."""
    config = config or FitConfig()
    families = [Family.parse(f) if isinstance(f, str) else Family(f) for f in families]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda f: fit_operator(f, data, config), families))
    return [fit_operator(f, data, config) for f in families]


def select_operator(models: Sequence[FittedModel]) -> FittedModel:
    """Highest accuracy; then most unambiguously classified instances; then roster order.

    Fits flagged non-satisfactory are only chosen when nothing else is available.
    """
    if not models:
        raise UsageError("no fitted models to choose from")
    pool = [m for m in models if m.satisfactory] or list(models)
    return max(
        pool,
        key=lambda m: (m.train_accuracy, m.classified_count, -ROSTER.index(m.spec.family)),
    )


def _check_width(model: FittedModel, width: int):
    if model.attributes and width != len(model.attributes):
        raise UsageError(f"instance width {width} does not match model width {len(model.attributes)}")


def classify(model: FittedModel, memberships) -> str:
    xs = np.asarray(memberships, dtype=float).ravel()
    _check_width(model, xs.size)
    value = aggregate_rows(model.spec, xs[None, :])
    return model.class_labels[int(classify_values(model.thresholds, value)[0])]


def predict_index(model: FittedModel, data: FuzzifiedDataset) -> np.ndarray:
    _check_width(model, data.n_inputs)
    return classify_values(model.thresholds, aggregate_column(model.spec, data))


def evaluate(model: FittedModel, data: FuzzifiedDataset):
    """Score a model on a dataset; returns (MatchCounts, accuracy)."""
    if tuple(data.class_labels) != model.class_labels:
        raise UsageError("dataset classes do not match the model's classes")
    predicted = predict_index(model, data)
    ok = int(np.sum(predicted == data.class_index))
    counts = MatchCounts(ok, data.n_instances - ok)
    return counts, ok / data.n_instances
