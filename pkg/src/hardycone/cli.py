"""Command line entry point: run one experiment config, write report and curves.

Exit codes: 0 success, 2 config/validation error (no output written),
3 numeric failure or unwritable output, 4 expectation mismatch (report is
still written so the mismatch can be inspected).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .lab import ConeHypothesisError, DivergentDenominatorError
from .quadrature import QuadratureError
from .reports import (
    ConfigError,
    NumericFailure,
    emit_curves,
    load_config,
    run_experiment,
    write_report,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardycone",
        description="Run a weighted-inequality experiment from a YAML config.",
    )
    parser.add_argument("--config", required=True, help="experiment config (YAML)")
    parser.add_argument("--out", default=".", help="output directory (default: cwd)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--budget", type=int, default=None, help="override the search budget")
    parser.add_argument("--tol-abs", type=float, default=None, help="absolute quadrature tolerance")
    parser.add_argument("--tol-rel", type=float, default=None, help="relative quadrature tolerance")
    parser.add_argument(
        "--threads", type=int, default=1,
        help="worker threads; results are order-independent so this never changes them",
    )
    parser.add_argument("--emit-csv", action="store_true", help="write one CSV per curve")
    parser.add_argument(
        "--plots", action=argparse.BooleanOptionalAction, default=None,
        help="render PNG figures next to the CSV curves (default: with --emit-csv)",
    )
    return parser


def _apply_overrides(config, args):
    raw = dict(config.raw)
    if args.seed is not None:
        raw["seed"] = int(args.seed)
    if args.budget is not None:
        if "budget" not in raw:
            raise ConfigError(f"--budget does not apply to kind '{raw['kind']}'")
        raw["budget"] = int(args.budget)
    tol = dict(raw["tolerances"])
    if args.tol_abs is not None:
        tol["abs"] = float(args.tol_abs)
    if args.tol_rel is not None:
        tol["rel"] = float(args.tol_rel)
    raw["tolerances"] = tol
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    from .reports import ExperimentConfig

    return ExperimentConfig.from_dict(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        config = _apply_overrides(config, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run_experiment(config)
    except (NumericFailure, QuadratureError, DivergentDenominatorError, ConeHypothesisError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3

    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_report(report, out_dir / config.raw["output"])
        if args.emit_csv:
            emit_curves(report, out_dir)
        if args.plots or (args.plots is None and args.emit_csv):
            from .plots import render_curves

            render_curves(report, out_dir)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 3

    if not report.passed:
        failed = [k for k, v in report.expectations["checks"].items() if not v["passed"]]
        print(f"expectation mismatch: {', '.join(failed)}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
