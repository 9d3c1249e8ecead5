"""
Command-line front end: verify, witnesses and classify.

Exit codes: 0 when every check passes, 1 when at least one fails, 2 on
unreadable input, bad flags or bad environment values.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .classify import Classification
from .config import Settings
from .errors import InputError, VerificationFailed
from .formats import load_document
from .groupoid import MODELS, FiniteGroupoid, check_duality_pairing, sample_infinite, validate_groupoid
from .inputs import Job, parse_document, preset_document
from .pipeline import PATHS, run_verification
from .report import FAIL, PASS, SKIP, ReportBuilder, VerificationReport

logger = logging.getLogger(__name__)

STATUS_ICONS = {PASS: "✅", FAIL: "❌", SKIP: "⏭️"}


@dataclass
class Outcome:
    report: VerificationReport
    classification: Classification


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wmha", description="Exact verification of weak multiplier Hopf algebras over Q(i)."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "run the verification pipeline and report every check"),
        ("witnesses", "print E, S, F1..F4, ε and the ε_s/ε_t images of a passing input"),
        ("classify", "print the one-line classification"),
    ):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("input", nargs="?", help="JSON input document")
        sub.add_argument("--preset", help="groupoid preset, e.g. pair:2 or bundle:cyclic:2:inf")
        sub.add_argument("--model", choices=MODELS, default="function", help="model algebra of a groupoid")
        sub.add_argument("--path", choices=PATHS, default="both", help="which characterization to check")
        sub.add_argument("--report", help="write the JSON report to this file")
        sub.add_argument("--seed", type=int, help="seed for sampled checks (default WMHA_SEED)")
        sub.add_argument("--windows", type=int, help="windows of an infinite preset (default WMHA_WINDOWS)")
        sub.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    return parser


def load_job(args: argparse.Namespace) -> Job:
    """
    Raises:
        InputError: If neither or both of an input file and --preset are given.
    """
    if args.input and args.preset:
        raise InputError("give an input file or --preset, not both")
    if args.preset:
        return parse_document(preset_document(args.preset, args.model))
    if not args.input:
        raise InputError("an input file or --preset is required")
    return parse_document(load_document(args.input))


def execute(job: Job, settings: Settings, path: str) -> Outcome:
    """Run whatever the job needs: a windowed run, a groupoid check or the pipeline."""
    if job.lazy:
        windowed = sample_infinite(job.groupoid, job.model, settings.windows, settings.seed, settings, path)
        windowed.report.input_digest = job.digest
        return Outcome(windowed.report, windowed.classification)
    if job.presentation is None:
        builder = ReportBuilder()
        builder.add(validate_groupoid(job.groupoid))
        report = VerificationReport.from_builder(builder, seed=settings.seed, input_digest=job.digest)
        return Outcome(report, Classification())
    run = run_verification(job.presentation, settings, path)
    if isinstance(job.groupoid, FiniteGroupoid):
        run.builder.add(validate_groupoid(job.groupoid))
        run.builder.add(check_duality_pairing(job.groupoid))
    report = VerificationReport.from_builder(
        run.builder,
        classification=run.classification.to_json(),
        paths=run.paths,
        seed=settings.seed,
        input_digest=job.digest,
    )
    return Outcome(report, run.classification)


def _write_report(report: VerificationReport, target: Optional[str], settings: Settings) -> None:
    if not target:
        return
    Path(target).write_text(report.dumps(settings.report_indent) + "\n", encoding="utf-8")
    print(f"🔧 Report written to {target}")


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    outcome = execute(load_job(args), settings, args.path)
    report = outcome.report
    counts = {status: sum(1 for c in report.checks if c.status == status) for status in (PASS, FAIL, SKIP)}
    for check in report.checks:
        if check.status == FAIL or args.verbose:
            print(f"{STATUS_ICONS[check.status]} {check.id}: {check.detail}")
    _write_report(report, args.report, settings)
    summary = f"{counts[PASS]} passed, {counts[FAIL]} failed, {counts[SKIP]} skipped"
    if report.verdict == PASS:
        print(f"\n✅ Verified: {summary}")
    else:
        first = report.first_failure()
        print(f"\n❌ Failed at {first.id}: {summary}")
    return report.exit_code


def cmd_witnesses(args: argparse.Namespace, settings: Settings) -> int:
    outcome = execute(load_job(args), settings, args.path)
    report = outcome.report
    _write_report(report, args.report, settings)
    if report.verdict != PASS:
        first = report.first_failure()
        raise VerificationFailed(f"no witnesses for a failing input, first failure {first.id}: {first.detail}")
    print(json.dumps(report.witnesses, indent=settings.report_indent, sort_keys=True, ensure_ascii=False))
    return 0


def cmd_classify(args: argparse.Namespace, settings: Settings) -> int:
    outcome = execute(load_job(args), settings, args.path)
    _write_report(outcome.report, args.report, settings)
    line = outcome.classification.one_line()
    reasons = outcome.classification.reasons
    if reasons:
        line += " (" + "; ".join(f"{k}: {v}" for k, v in sorted(reasons.items())) + ")"
    print(line)
    return outcome.report.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env().override(seed=args.seed, windows=args.windows)
    except InputError as e:
        print(f"\n❌ Error: {str(e)}")
        return 2
    level = ("WARNING", "INFO", "DEBUG")[min(args.verbose, 2)] if args.verbose else settings.log_level
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        match args.command:
            case "verify":
                return cmd_verify(args, settings)
            case "witnesses":
                return cmd_witnesses(args, settings)
            case "classify":
                return cmd_classify(args, settings)
            case _:
                raise InputError(f"unknown command {args.command!r}")
    except InputError as e:
        print(f"\n❌ Error: {str(e)}")
        return 2
    except VerificationFailed as e:
        print(f"\n❌ {str(e)}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
