"""Fit fuzzy aggregation operators to labelled data and pick the best one."""

from .errors import (
    DataError,
    DegenerateAttributeError,
    DomainError,
    FormatError,
    FuzzaggError,
    LoadError,
    ParameterError,
    SchemaError,
    UsageError,
)
from .fitter import (
    FitConfig,
    FitReport,
    FittedModel,
    MatchCounts,
    brute_force_threshold_oracle,
    classify,
    evaluate,
    fit_all,
    fit_operator,
    select_operator,
    sweep_threshold,
)
from .fuzzify import AttributeSpec, FuzzifiedDataset, RawDataset, prepare
from .operators import (
    DEFAULT_ROSTER,
    ROSTER,
    AggregationResult,
    Family,
    OperatorClass,
    OperatorSpec,
    aggregate,
    dual_tconorm,
    operator_class,
)

__version__ = "0.1.0"
