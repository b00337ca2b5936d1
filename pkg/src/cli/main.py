from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

from pydantic import ValidationError

from application.services import BOUND_QUANTITIES, VerificationService
from domain.errors import FoldsieveError, NumericError
from domain.formatting import parse_int_list
from domain.models import RunConfig
from infrastructure import settings as settings_module
from infrastructure.logging import configure_logging
from infrastructure.reports import CSV_COLUMNS, ReportWriter
from infrastructure.storage import Ledger

logger = logging.getLogger(__name__)

EXIT_CLEAN = 0
EXIT_USAGE = 1
EXIT_FINDINGS = 2
EXIT_INTERNAL = 3

COMMON_KEYS = frozenset({"command", "seed", "threads", "out", "format", "timings"})


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return parse_int_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--timings", action="store_true")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="foldsieve", description="Sieve discrepancy and folded-scale checks"
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    primes = commands.add_parser("primes", help="Prime table queries")
    primes.add_argument("--limit", type=int, default=None)
    primes.add_argument("--nth", type=_int_list, default=None)
    primes.add_argument("--count", type=_int_list, default=None)

    theorem1 = commands.add_parser("theorem1", help="Interval discrepancy scan")
    theorem1.add_argument("--n-lo", type=int, default=4)
    theorem1.add_argument("--n-hi", type=int, default=200)
    theorem1.add_argument("--base", type=int, choices=[0, 1], default=1)
    theorem1.add_argument("--study", action="store_true", help="mean ratio over n in [150, 200]")
    theorem1.add_argument("--samples", type=int, default=0)

    fold = commands.add_parser("fold", help="Folded coprime counts and selections")
    fold.add_argument("--i", type=int, required=True)
    fold.add_argument("--n", type=int, required=True)
    fold.add_argument("--r", type=int, required=True)
    fold.add_argument("--selections", action="store_true")

    shift = commands.add_parser("shift", help="Locate plain windows carrying a selection")
    shift.add_argument("--j", type=int, required=True)
    shift.add_argument("--n", type=int, required=True)
    shift.add_argument("--r", type=int, required=True)
    shift.add_argument("--choices", type=_int_list, default=None)

    twin = commands.add_parser("twin", help="Twin prime pairs")
    twin.add_argument("--limit", type=int, default=10**6)
    twin.add_argument("--oracle", action="store_true")
    twin.add_argument("--n", type=int, default=None)
    twin.add_argument("--i", type=int, default=None)

    goldbach = commands.add_parser("goldbach", help="Goldbach representations")
    goldbach.add_argument("--range", type=int, nargs=2, metavar=("LO", "HI"), default=None)
    goldbach.add_argument("--target", type=int, default=None)
    goldbach.add_argument("--oracle", action="store_true")
    goldbach.add_argument("--z", type=int, default=None)
    goldbach.add_argument("--n", type=int, default=None)

    ident = commands.add_parser("identities", help="Totient and CRT counting identities")
    ident.add_argument("--lemma", choices=["BN", "BM", "CAP", "MAB"], default=None)
    ident.add_argument("-J", type=_int_list, default=None)
    ident.add_argument("-s", type=int, default=0)
    ident.add_argument("-t", type=int, default=2)
    ident.add_argument("-n", type=int, default=1)
    ident.add_argument("-V", type=_int_list, default=None)
    ident.add_argument("-b", type=int, default=0)
    ident.add_argument("-S", type=_int_list, default=None)
    ident.add_argument("--sweep", action="store_true")
    ident.add_argument("--instances", type=int, default=None)
    ident.add_argument("--max-period", type=int, default=None)

    bounds = commands.add_parser("bounds", help="Analytic bound quantities")
    bounds.add_argument("--which", choices=[*BOUND_QUANTITIES, "all"], default="all")
    for name, kind in (("x", float), ("r", float), ("c", int), ("k", int), ("n", int)):
        bounds.add_argument(f"--{name}", type=kind, default=None)
    for name, kind in (("j", int), ("i", int), ("z", int), ("s", float), ("j-n", float)):
        bounds.add_argument(f"--{name}", type=kind, default=None)

    report = commands.add_parser("report", help="Reproduction set and findings ledger")
    report.add_argument("--history", action="store_true")
    report.add_argument("--limit", type=int, default=20)

    for name, sub in commands.choices.items():
        sub.epilog = "CSV columns: " + ", ".join(CSV_COLUMNS[name])
        _add_common(sub)
    return parser


def _params(args: argparse.Namespace) -> dict[str, Any]:
    return {
        key: value
        for key, value in vars(args).items()
        if key not in COMMON_KEYS and value is not None and value is not False
    }


def main(argv: Sequence[str] | None = None) -> int:
    settings = settings_module.settings
    configure_logging(settings.log_level)
    args = build_parser().parse_args(argv)

    ledger = Ledger(settings.database_url) if settings.ledger_enabled else None
    writer = ReportWriter(settings.report_dir if settings.archive_reports else None)
    try:
        config = RunConfig(
            command=args.command,
            params=_params(args),
            seed=settings.seed if args.seed is None else args.seed,
            out=args.out,
            format=args.format,
            threads=args.threads or settings.threads,
            include_timings=args.timings,
        )
        if ledger is not None:
            ledger.init_db()
        envelope = VerificationService(settings, ledger).run(config)
        writer.write(envelope, config.format, config.out)
    except (FoldsieveError, ValidationError) as exc:
        if isinstance(exc, NumericError):
            logger.exception("numeric_failure", extra={"command": args.command})
            return EXIT_INTERNAL
        logger.error("invalid_request", extra={"command": args.command, "error": str(exc)})
        print(f"foldsieve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        logger.exception("internal_error", extra={"command": args.command})
        return EXIT_INTERNAL
    return EXIT_FINDINGS if envelope.has_findings else EXIT_CLEAN


if __name__ == "__main__":
    sys.exit(main())
