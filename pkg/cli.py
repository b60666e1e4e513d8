"""Command-line interface for simulating and analyzing one-trial CHSH experiments."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

from src import __version__, config, reports, storage
from src.errors import (
    EmptyCellError,
    InvalidModelError,
    MissingParamError,
    ModelFormatError,
    NotLocalError,
    OutOfRangeError,
    SpreadsheetSchemaError,
    UnknownModelError,
)
from src.models import Behavior
from src.sampler import ExperimentConfig, run_experiment
from src.validators import validate, validate_for_estimation
from src.zoo import to_local_model

logger = config.get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_EMPTY_CELL = 4

_INPUT_ERRORS = (
    ModelFormatError,
    UnknownModelError,
    MissingParamError,
    SpreadsheetSchemaError,
    OutOfRangeError,
)


def _error(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(document: Dict[str, Any], out: Optional[Path]) -> None:
    """Write *document* to *out* atomically, or print it when no path is given."""

    if out is None:
        sys.stdout.write(storage.render_document(document))
        return
    storage.write_document(document, out)
    print(f"wrote {document.get('command', 'document')} report to {out}")


def run_simulate(args: argparse.Namespace) -> int:
    model = storage.load_model_ref(args.model)
    policy = storage.load_policy_ref(args.policy)
    sampled = model if isinstance(model, Behavior) else to_local_model(model)

    experiment = ExperimentConfig(args.trials, args.seed, sampled, policy)
    spreadsheet = run_experiment(experiment, workers=args.workers)
    storage.write_spreadsheet_csv(spreadsheet, args.out)
    print(f"wrote {len(spreadsheet)} trials to {args.out} (config digest {spreadsheet.config_digest})")
    return EXIT_OK


def run_exact(args: argparse.Namespace) -> int:
    model = storage.load_model_ref(args.model)
    _emit(reports.exact_report(model, args.model), args.out)
    return EXIT_OK


def run_analyze(args: argparse.Namespace) -> int:
    spreadsheet = storage.read_spreadsheet_csv(args.input)
    model = storage.load_model_ref(args.model) if args.model else None
    _emit(reports.summary_report(spreadsheet, str(args.input), model, args.model), args.out)
    return EXIT_OK


def run_oracle(args: argparse.Namespace) -> int:
    model = storage.load_model_ref(args.model)
    if isinstance(model, Behavior):
        _error(
            f"{NotLocalError.code}: behaviors are not decomposable into deterministic strategies; "
            "use the 'exact' command for CHSH-only analysis"
        )
        logger.error("Oracle rejected behavior input %s", args.model)
        return EXIT_INVALID
    _emit(reports.oracle_report(model, args.model), args.out)
    return EXIT_OK


def run_validate(args: argparse.Namespace) -> int:
    report = validate(storage.load_model_ref(args.model))
    if args.policy:
        policy_report = validate_for_estimation(storage.load_policy_ref(args.policy))
        for violation in policy_report.violations:
            report.add(violation.code, violation.message, f"policy.{violation.path}" if violation.path else "policy")
    sys.stdout.write(storage.render_document(report.to_dict()))
    return EXIT_OK if report.ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    """Parse command-line arguments."""

    parser = argparse.ArgumentParser(
        prog="bellsim",
        description="Simulate one-trial CHSH experiments and analyze them exactly or empirically.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Sample N trials into a spreadsheet CSV.")
    simulate.add_argument("--model", required=True, help="Model file path or builtin:<name>?k=v&k=v.")
    simulate.add_argument("--policy", required=True, help="Setting policy file path or builtin:<name>?k=v.")
    simulate.add_argument("--trials", type=int, required=True, help="Number of trials (N >= 1).")
    simulate.add_argument("--seed", type=int, required=True, help="Master seed (unsigned 64-bit).")
    simulate.add_argument("--out", type=Path, required=True, help="Destination CSV path.")
    simulate.add_argument("--workers", type=_positive_int, default=None, help="Sampler process count.")
    simulate.set_defaults(handler=run_simulate)

    exact = commands.add_parser("exact", help="Exact correlations, CHSH values and counterfactual joint law.")
    exact.add_argument("--model", required=True)
    exact.add_argument("--out", type=Path, default=None)
    exact.set_defaults(handler=run_exact)

    analyze = commands.add_parser("analyze", help="Estimate correlations and CHSH from a spreadsheet CSV.")
    analyze.add_argument("--input", type=Path, required=True)
    analyze.add_argument("--model", default=None, help="Optional model ref for exact values and z-scores.")
    analyze.add_argument("--out", type=Path, default=None)
    analyze.set_defaults(handler=run_analyze)

    oracle = commands.add_parser("oracle", help="Decompose a local model into deterministic strategies.")
    oracle.add_argument("--model", required=True)
    oracle.add_argument("--out", type=Path, default=None)
    oracle.set_defaults(handler=run_oracle)

    check = commands.add_parser("validate", help="Print the validation report of a model (and policy).")
    check.add_argument("--model", required=True)
    check.add_argument("--policy", default=None)
    check.set_defaults(handler=run_validate)

    return parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the CLI; returns the process exit status."""

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    handler: Callable[[argparse.Namespace], int] = args.handler
    logger.info("Running %s", args.command)
    try:
        return handler(args)
    except InvalidModelError as exc:
        _error(str(exc))
        sys.stderr.write(storage.render_document(exc.report.to_dict()))
        logger.error("%s failed validation: %s", args.command, exc)
        return EXIT_INVALID
    except EmptyCellError as exc:
        _error(str(exc))
        logger.error("%s: %s", args.command, exc)
        return EXIT_EMPTY_CELL
    except _INPUT_ERRORS as exc:
        _error(str(exc))
        logger.error("%s rejected input: %s", args.command, exc)
        return EXIT_INVALID
    except NotLocalError as exc:
        _error(f"{exc.code}: {exc}")
        return EXIT_INVALID
    except OSError as exc:
        _error(f"I/O error: {exc}")
        logger.error("%s failed with an I/O error: %s", args.command, exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
