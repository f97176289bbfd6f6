"""Fuzzy aggregation operators: t-norms, t-conorms and averaging operators.

Every operator is evaluated row-wise on a 2-D array of membership degrees,
so the fitter can aggregate a whole dataset in one call.  Binary t-norms and
t-conorms are extended to n arguments by a left fold; associativity makes
the grouping irrelevant.  Averaging operators are defined directly on the
n-vector from its min, max and arithmetic mean.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError, UsageError


class OperatorClass(str, enum.Enum):
    TNORM = "t-norm"
    TCONORM = "t-conorm"
    AVERAGING = "averaging"


class Family(str, enum.Enum):
    EinsteinProduct = "EinsteinProduct"
    AlgebraicProduct = "AlgebraicProduct"
    HamacherProduct = "HamacherProduct"
    Min = "Min"
    DombiIntersection = "DombiIntersection"
    EinsteinSum = "EinsteinSum"
    AlgebraicSum = "AlgebraicSum"
    HamacherSum = "HamacherSum"
    Max = "Max"
    DombiUnion = "DombiUnion"
    DuboisUnion = "DuboisUnion"
    FuzzyAnd = "FuzzyAnd"
    FuzzyOr = "FuzzyOr"
    ConvexMin = "ConvexMin"
    ConvexMax = "ConvexMax"

    @classmethod
    def parse(cls, name: str) -> "Family":
        key = name.strip().replace("-", "").replace("_", "").replace(" ", "").lower()
        for fam in cls:
            if fam.value.lower() == key:
                return fam
        raise UsageError(f"unknown operator family {name!r}")


@dataclass(frozen=True)
class _FamilyInfo:
    tag: OperatorClass
    title: str
    param_name: Optional[str] = None
    # (low, high, low_inclusive); high is always inclusive, None = unbounded
    param_range: Optional[tuple] = None
    open_interval: bool = False


_UNIT = (0.0, 1.0, True)

FAMILY_INFO = {
    Family.EinsteinProduct: _FamilyInfo(OperatorClass.TNORM, "Einstein Product"),
    Family.AlgebraicProduct: _FamilyInfo(OperatorClass.TNORM, "Algebraic Product"),
    Family.HamacherProduct: _FamilyInfo(
        OperatorClass.TNORM, "Hamacher Product", "gamma", (0.0, None, True)
    ),
    Family.Min: _FamilyInfo(OperatorClass.TNORM, "MIN Operator"),
    Family.DombiIntersection: _FamilyInfo(
        OperatorClass.TNORM, "Dombi Intersection", "lambda", (0.0, None, False), True
    ),
    Family.EinsteinSum: _FamilyInfo(OperatorClass.TCONORM, "Einstein Sum"),
    Family.AlgebraicSum: _FamilyInfo(OperatorClass.TCONORM, "Algebraic Sum"),
    Family.HamacherSum: _FamilyInfo(
        OperatorClass.TCONORM, "Hamacher Sum", "gamma", (0.0, None, True)
    ),
    Family.Max: _FamilyInfo(OperatorClass.TCONORM, "MAX Operator"),
    Family.DombiUnion: _FamilyInfo(
        OperatorClass.TCONORM, "Dombi Union", "lambda", (0.0, None, False), True
    ),
    Family.DuboisUnion: _FamilyInfo(
        OperatorClass.TCONORM, "Dubois Union", "alpha", _UNIT, True
    ),
    Family.FuzzyAnd: _FamilyInfo(OperatorClass.AVERAGING, "Fuzzy AND", "gamma", _UNIT),
    Family.FuzzyOr: _FamilyInfo(OperatorClass.AVERAGING, "Fuzzy OR", "gamma", _UNIT),
    Family.ConvexMin: _FamilyInfo(
        OperatorClass.AVERAGING, "Convex combination of min", "gamma", _UNIT
    ),
    Family.ConvexMax: _FamilyInfo(
        OperatorClass.AVERAGING, "Convex combination of max", "gamma", _UNIT
    ),
}

# Table order; also the last-resort tie-break when selecting an operator.
ROSTER = tuple(Family)

# The fourteen operators reported for every dataset.  Dubois union only
# replaces the second max column on some datasets, so it is opt-in.
DEFAULT_ROSTER = tuple(f for f in ROSTER if f is not Family.DuboisUnion)

DUAL_PAIRS = {
    Family.AlgebraicProduct: Family.AlgebraicSum,
    Family.EinsteinProduct: Family.EinsteinSum,
    Family.Min: Family.Max,
}


def is_parametrized(family: Family) -> bool:
    return FAMILY_INFO[family].param_name is not None


@dataclass(frozen=True)
class OperatorSpec:
    """An operator family plus its parameter (None for nonparametrized families)."""

    family: Family
    param: Optional[float] = None

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        info = FAMILY_INFO[family]
        if info.param_name is None:
            if self.param is not None:
                raise ParameterError(f"{family.value} takes no parameter")
            return
        if self.param is None:
            raise ParameterError(f"{family.value} requires {info.param_name}")
        value = float(self.param)
        object.__setattr__(self, "param", value)
        lo, hi, lo_inclusive = info.param_range
        bad = not math.isfinite(value)
        bad = bad or (value < lo if lo_inclusive else value <= lo)
        bad = bad or (hi is not None and value > hi)
        if bad:
            raise ParameterError(
                f"{info.param_name}={value!r} outside the valid range of {family.value}"
            )

    @property
    def operator_class(self) -> OperatorClass:
        return FAMILY_INFO[self.family].tag

    def describe(self) -> str:
        info = FAMILY_INFO[self.family]
        if info.param_name is None:
            return info.title
        return f"{info.title} ({info.param_name}={self.param:g})"


@dataclass(frozen=True)
class AggregationResult:
    value: float
    spec: OperatorSpec


def operator_class(spec) -> OperatorClass:
    family = spec.family if isinstance(spec, OperatorSpec) else Family(spec)
    return FAMILY_INFO[family].tag


# -- binary forms -----------------------------------------------------------


def _einstein_product(a, b, _):
    return a * b / (2.0 - (a + b - a * b))


def _algebraic_product(a, b, _):
    return a * b


def _hamacher_product(a, b, gamma):
    num = a * b
    den = gamma + (1.0 - gamma) * (a + b - a * b)
    # gamma = 0 and a = b = 0: the limit is 0
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / den
    return np.where(den == 0.0, 0.0, out)


def _einstein_sum(a, b, _):
    return (a + b) / (1.0 + a * b)


def _algebraic_sum(a, b, _):
    return a + b - a * b


def _hamacher_sum(a, b, gamma):
    num = a + b - (2.0 - gamma) * a * b
    den = 1.0 - (1.0 - gamma) * a * b
    # gamma = 0 and a = b = 1: the limit is 1
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / den
    return np.where(den == 0.0, 1.0, out)


def _dubois_intersection(a, b, alpha):
    return a * b / np.maximum(np.maximum(a, b), alpha)


def _fold(binary: Callable, m: np.ndarray, param) -> np.ndarray:
    acc = m[:, 0].copy()
    for j in range(1, m.shape[1]):
        acc = binary(acc, m[:, j], param)
    return acc


def _dombi_norm(r: np.ndarray, lam: float) -> np.ndarray:
    """Row-wise (sum r_i**lam) ** (1/lam) for positive ratios r."""
    logs = lam * np.log(r)
    peak = logs.max(axis=1)
    lse = peak + np.log(np.exp(logs - peak[:, None]).sum(axis=1))
    log_domain = np.abs(logs).max(axis=1) > 500.0
    with np.errstate(over="ignore"):
        out = np.exp(lse / lam)
        if not log_domain.all():
            direct = np.power(np.power(r, lam).sum(axis=1), 1.0 / lam)
            out = np.where(log_domain, out, direct)
    return out


def _dombi_intersection(m, lam):
    return 1.0 / (1.0 + _dombi_norm((1.0 - m) / m, lam))


def _dombi_union(m, lam):
    return 1.0 - 1.0 / (1.0 + _dombi_norm(m / (1.0 - m), lam))


def _evaluate(family: Family, m: np.ndarray, p) -> np.ndarray:
    if family is Family.EinsteinProduct:
        return _fold(_einstein_product, m, p)
    if family is Family.AlgebraicProduct:
        return _fold(_algebraic_product, m, p)
    if family is Family.HamacherProduct:
        return _fold(_hamacher_product, m, p)
    if family is Family.Min:
        return m.min(axis=1)
    if family is Family.DombiIntersection:
        return _dombi_intersection(m, p)
    if family is Family.EinsteinSum:
        return _fold(_einstein_sum, m, p)
    if family is Family.AlgebraicSum:
        return _fold(_algebraic_sum, m, p)
    if family is Family.HamacherSum:
        return _fold(_hamacher_sum, m, p)
    if family is Family.Max:
        return m.max(axis=1)
    if family is Family.DombiUnion:
        return _dombi_union(m, p)
    if family is Family.DuboisUnion:
        return 1.0 - _fold(_dubois_intersection, 1.0 - m, p)
    lo, hi = m.min(axis=1), m.max(axis=1)
    if family is Family.FuzzyAnd:
        return p * lo + (1.0 - p) * m.mean(axis=1)
    if family is Family.FuzzyOr:
        return p * hi + (1.0 - p) * m.mean(axis=1)
    if family is Family.ConvexMin:
        return p * lo + (1.0 - p) * hi
    if family is Family.ConvexMax:
        return p * hi + (1.0 - p) * lo
    raise UsageError(f"unhandled family {family!r}")


def aggregate_rows(spec: OperatorSpec, matrix) -> np.ndarray:
    """Aggregate each row of an (n_instances, n_attributes) membership matrix.

    Raises UsageError for an empty matrix and DomainError when a value falls
    outside [0, 1], or outside the open interval for the Dombi and Dubois
    families.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise UsageError("aggregation needs at least one value per row")
    if not np.all(np.isfinite(m)) or m.min() < 0.0 or m.max() > 1.0:
        raise DomainError("membership values must lie in [0, 1]")
    if FAMILY_INFO[spec.family].open_interval and (m.min() <= 0.0 or m.max() >= 1.0):
        raise DomainError(
            f"{spec.family.value} needs memberships strictly inside (0, 1); clamp first"
        )
    # folds can overshoot 1 by an ulp near the top of the range
    return np.clip(_evaluate(spec.family, m, spec.param), 0.0, 1.0)


def aggregate(spec: OperatorSpec, xs: Sequence[float]) -> AggregationResult:
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size == 0:
        raise UsageError("aggregation needs a nonempty input")
    return AggregationResult(float(aggregate_rows(spec, xs[None, :])[0]), spec)


def dual_tconorm(tnorm_spec: OperatorSpec, xs: Sequence[float]) -> float:
    """Evaluate 1 - t(1 - x1, ..., 1 - xn), the t-conorm generated from a t-norm."""
    if tnorm_spec.operator_class is not OperatorClass.TNORM:
        raise UsageError(f"{tnorm_spec.family.value} is not a t-norm")
    xs = np.asarray(xs, dtype=float)
    return 1.0 - aggregate(tnorm_spec, 1.0 - xs).value
