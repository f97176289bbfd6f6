"""Randomised self-test of the operator axioms.

Each check draws random membership vectors with a seeded generator and
reports how many samples violated the property.  ``evaluator`` lets a test
substitute a deliberately broken operator implementation.
"""
from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .fitter import DEFAULT_PARAM_GRIDS
from .operators import (
    DUAL_PAIRS,
    FAMILY_INFO,
    ROSTER,
    Family,
    OperatorClass,
    OperatorSpec,
    aggregate_rows,
    is_parametrized,
)

TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    axiom: str
    family: str
    samples: int
    failures: int
    worst: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _specs(family, rng, count):
    if not is_parametrized(family):
        return [OperatorSpec(family)] * count
    grid = DEFAULT_PARAM_GRIDS[family]
    return [OperatorSpec(family, grid[i]) for i in rng.integers(0, len(grid), size=count)]


def _grouped_eval(evaluator, specs, vectors):
    """Evaluate ragged vectors, batching rows that share a spec and a length."""
    out = np.empty(len(vectors))
    groups = defaultdict(list)
    for i, (s, v) in enumerate(zip(specs, vectors)):
        groups[(s, len(v))].append(i)
    for (spec, _), idx in groups.items():
        out[idx] = evaluator(spec, np.array([vectors[i] for i in idx]))
    return out


def random_vectors(rng, count, n_min=2, n_max=19, lo=0.001, hi=0.999):
    sizes = rng.integers(n_min, n_max + 1, size=count)
    return [rng.uniform(lo, hi, size=n) for n in sizes]


def check_family(family: Family, samples: int, rng, evaluator=aggregate_rows) -> list:
    tag = FAMILY_INFO[family].tag
    specs = _specs(family, rng, samples)
    xs = random_vectors(rng, samples)
    fx = _grouped_eval(evaluator, specs, xs)
    results = []

    bad = (fx < 0) | (fx > 1) | ~np.isfinite(fx)
    results.append(CheckResult("range", family.value, samples, int(bad.sum())))

    bumped = []
    for x in xs:
        y = x.copy()
        j = rng.integers(0, x.size)
        y[j] = x[j] + rng.uniform(0, 1) * (0.999 - x[j])
        bumped.append(y)
    fy = _grouped_eval(evaluator, specs, bumped)
    drop = fx - fy
    results.append(
        CheckResult("monotonicity", family.value, samples, int((drop > TOL).sum()), float(max(drop.max(), 0)))
    )

    lo = np.array([x.min() for x in xs])
    hi = np.array([x.max() for x in xs])
    if tag is OperatorClass.TNORM:
        excess = fx - lo
    elif tag is OperatorClass.TCONORM:
        excess = hi - fx
    else:
        excess = np.maximum(lo - fx, fx - hi)
    results.append(
        CheckResult("ordering", family.value, samples, int((excess > TOL).sum()), float(max(excess.max(), 0)))
    )

    if tag is not OperatorClass.AVERAGING:
        pairs = rng.uniform(0.001, 0.999, size=(samples, 3))
        ab = _grouped_eval(evaluator, specs, list(pairs[:, :2]))
        ba = _grouped_eval(evaluator, specs, list(pairs[:, [1, 0]]))
        err = np.abs(ab - ba)
        results.append(CheckResult("commutativity", family.value, samples, int((err > TOL).sum()), float(err.max())))
        left = _grouped_eval(evaluator, specs, [np.array([a, p[2]]) for a, p in zip(ab, pairs)])
        bc = _grouped_eval(evaluator, specs, list(pairs[:, 1:]))
        right = _grouped_eval(evaluator, specs, [np.array([p[0], b]) for b, p in zip(bc, pairs)])
        err = np.abs(left - right)
        results.append(CheckResult("associativity", family.value, samples, int((err > TOL).sum()), float(err.max())))

        if not FAMILY_INFO[family].open_interval:
            a = rng.uniform(0, 1, size=samples)
            if tag is OperatorClass.TNORM:
                ident, absorb, target = 1.0, 0.0, 0.0
            else:
                ident, absorb, target = 0.0, 1.0, 1.0
            ones = _grouped_eval(evaluator, specs, [np.full(n, ident) for n in rng.integers(2, 20, size=samples)])
            zero = _grouped_eval(evaluator, specs, [np.array([v, absorb]) for v in a])
            fails = int((np.abs(ones - ident) > TOL).sum() + (np.abs(zero - target) > TOL).sum())
            results.append(CheckResult("boundary", family.value, 2 * samples, fails))
    return results


def special_cases(samples: int, rng, evaluator=aggregate_rows) -> list:
    """Duality of the built-in pairs and the parameter values that collapse a family."""
    results = []
    pairs = rng.uniform(0.001, 0.999, size=(samples, 2))

    def ev(family, param, m):
        return evaluator(OperatorSpec(family, param), m)

    for tnorm, tconorm in DUAL_PAIRS.items():
        err = np.abs((1.0 - ev(tnorm, None, 1.0 - pairs)) - ev(tconorm, None, pairs))
        results.append(CheckResult("duality", f"{tnorm.value}/{tconorm.value}", samples,
                                   int((err > TOL).sum()), float(err.max())))

    xs = random_vectors(rng, samples)
    exact = [
        ("HamacherProduct(1)=AlgebraicProduct", (Family.HamacherProduct, 1.0), (Family.AlgebraicProduct, None)),
        ("FuzzyAnd(1)=Min", (Family.FuzzyAnd, 1.0), (Family.Min, None)),
        ("ConvexMin(1)=Min", (Family.ConvexMin, 1.0), (Family.Min, None)),
        ("ConvexMin(0)=Max", (Family.ConvexMin, 0.0), (Family.Max, None)),
    ]
    for name, (fa, pa), (fb, pb) in exact:
        a = _grouped_eval(evaluator, [OperatorSpec(fa, pa)] * samples, xs)
        b = _grouped_eval(evaluator, [OperatorSpec(fb, pb)] * samples, xs)
        results.append(CheckResult("reduction", name, samples, int((a != b).sum()), float(np.abs(a - b).max())))

    a = _grouped_eval(evaluator, [OperatorSpec(Family.FuzzyAnd, 0.0)] * samples, xs)
    mean = np.array([x.mean() for x in xs])
    err = np.abs(a - mean)
    results.append(CheckResult("reduction", "FuzzyAnd(0)=mean", samples, int((err > TOL).sum()), float(err.max())))

    # Dombi tends to min/max as lambda grows; at equal inputs the gap is
    # a(1-a)(2**(1/lambda) - 1), so the bound below is the worst case.
    mid = rng.uniform(0.05, 0.95, size=(samples, 2))
    for lam in (50.0, 1e6):
        bound = (2.0 ** (1.0 / lam) - 1.0) / 4.0 + TOL
        for fam, ref, name in (
            (Family.DombiIntersection, mid.min(axis=1), "Min"),
            (Family.DombiUnion, mid.max(axis=1), "Max"),
        ):
            err = np.abs(ev(fam, lam, mid) - ref)
            results.append(CheckResult("reduction", f"{fam.value}({lam:g})~{name}",
                                       samples, int((err > bound).sum()), float(err.max())))
    return results


def run_axiom_suite(samples: int = 1000, seed: int = 0, families=ROSTER,
                    evaluator: Optional[Callable] = None) -> list:
    rng = np.random.default_rng(seed)
    evaluator = evaluator or aggregate_rows
    results = []
    for family in families:
        results.extend(check_family(Family(family), samples, rng, evaluator))
    results.extend(special_cases(samples, rng, evaluator))
    return results


def summarize(results) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.axiom:<14} {r.family:<40} {r.failures}/{r.samples} violations (worst {r.worst:.3g})")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines)


def timed_suite(**kwargs):
    start = time.perf_counter()
    results = run_axiom_suite(**kwargs)
    return results, time.perf_counter() - start
