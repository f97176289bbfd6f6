"""Command-line entry point: ``fuzzagg {fit,report,classify,validate}``."""
from __future__ import annotations

import argparse
import sys

from . import axioms
from .dataset_io import export_report, format_report, load_model, load_schema, save_model, split_row
from .errors import FuzzaggError, UsageError
from .fitter import FitConfig
from .fuzzify import SIGMOID_FORMS
from .operators import DEFAULT_ROSTER, ROSTER, Family
from .pipeline import classify_raw, fit_dataset


def _grid_overrides(items):
    grids = {}
    for item in items or ():
        name, sep, values = item.partition("=")
        if not sep:
            raise UsageError(f"--grid expects FAMILY=v1,v2,..., got {item!r}")
        try:
            grids[Family.parse(name)] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"--grid {item!r}: values must be numbers") from None
    return grids


def _families(args):
    if args.families:
        return [Family.parse(f) for f in args.families.split(",") if f.strip()]
    roster = list(DEFAULT_ROSTER)
    if args.include_dubois:
        roster = list(ROSTER)
    return roster


def _add_fit_options(p):
    p.add_argument("--data", required=True, help="delimited data file")
    p.add_argument("--schema", required=True, help="schema file describing the columns")
    p.add_argument("--steps", type=int, default=1000, help="threshold grid steps per sweep")
    p.add_argument("--sigmoid", choices=SIGMOID_FORMS, default="corrected")
    p.add_argument("--grid", action="append", metavar="FAMILY=V1,V2,...",
                   help="override a family's parameter grid (repeatable)")
    p.add_argument("--bounds", choices=("overlap-region", "full-range"), default="overlap-region")
    p.add_argument("--families", help="comma-separated families to fit (default: the standard 14)")
    p.add_argument("--include-dubois", action="store_true", help="also fit the Dubois union")
    p.add_argument("--format", choices=("table", "delimited"), default="table")
    p.add_argument("--report", help="also write the report to this path")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzagg", description="Fit fuzzy aggregation operators to labelled data."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit every operator, save the best model, print the report")
    _add_fit_options(p)
    p.add_argument("--model", required=True, help="where to write the selected model")

    p = sub.add_parser("report", help="fit every operator and print the report only")
    _add_fit_options(p)

    p = sub.add_parser("classify", help="classify raw instances with a saved model")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--values", help="one raw instance, delimiter-separated")
    group.add_argument("--data", help="file of raw instances, one per line")
    p.add_argument("--schema", help="schema for --data (delimiter and missing marker)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--missing", default="?")

    p = sub.add_parser("validate", help="run the operator axiom self-test")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _run_fit(args, out):
    config = FitConfig(
        step_count=args.steps,
        param_grid=_grid_overrides(args.grid),
        sweep_bounds_policy=args.bounds,
        workers=args.workers,
    )
    result = fit_dataset(args.data, args.schema, config, args.sigmoid, _families(args))
    out.write(format_report(result.report, args.format))
    if args.report:
        export_report(result.report, args.report, args.format)
    return result


def cmd_fit(args, out=None):
    out = out or sys.stdout
    result = _run_fit(args, out)
    save_model(result.best, args.model)
    best = result.best
    thresholds = ", ".join(f"{t:.6g}" for t in best.thresholds)
    print(f"selected: {best.spec.describe()}", file=out)
    print(f"thresholds: {thresholds}", file=out)
    print(f"accuracy: {100 * best.train_accuracy:.4f}% "
          f"({best.correct_count}/{best.n_instances})", file=out)
    return 0


def cmd_report(args, out=None):
    out = out or sys.stdout
    _run_fit(args, out)
    return 0


def cmd_classify(args, out=None):
    out = out or sys.stdout
    model = load_model(args.model)
    delimiter, missing = args.delimiter, args.missing
    if args.schema:
        schema = load_schema(args.schema)
        delimiter, missing = schema.delimiter, schema.missing
    if args.values is not None:
        rows = [args.values]
    else:
        with open(args.data, encoding="utf-8") as fh:
            rows = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    for line in rows:
        print(classify_raw(model, split_row(line, delimiter), missing), file=out)
    return 0


def cmd_validate(args, out=None, evaluator=None):
    out = out or sys.stdout
    results, seconds = axioms.timed_suite(samples=args.samples, seed=args.seed, evaluator=evaluator)
    print(axioms.summarize(results), file=out)
    print(f"elapsed: {seconds:.2f}s", file=out)
    failed = sorted({r.axiom for r in results if not r.passed})
    if failed:
        print(f"violated axioms: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


COMMANDS = {"fit": cmd_fit, "report": cmd_report, "classify": cmd_classify, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "steps", 2) < 2:
        print("fuzzagg: usage error: --steps must be at least 2", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args)
    except FuzzaggError as exc:
        print(f"fuzzagg: {exc.stage} error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"fuzzagg: io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
