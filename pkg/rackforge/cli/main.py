"""
Command line entry point for rackforge.

Usage:
    rackforge verify FILE
    rackforge analyze FILE
    rackforge integrate FILE [--model NAME] [--tau-prime R] [--tau R] [--samples N] [--step H] [--tol T]
    rackforge strip FILE [--tau R] [--tau-prime R] [--model NAME]
    rackforge rackcheck FILE --construction NAME [--samples N] [--gauge-factor F] [--model NAME]

Exit codes: 0 all checks pass, 1 a check failed, 2 unusable input or configuration.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .. import __version__
from ..config import RackforgeConfig
from ..exceptions import RackforgeError
from .commands import COMMANDS, CONSTRUCTIONS
from .io import exit_code, write_report

logger = logging.getLogger(__name__)

EXIT_VIOLATION = 1
EXIT_INPUT = 2


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the input-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="JSON configuration file")
    common.add_argument("--log-level", type=str, choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level (default from config: INFO)")
    common.add_argument("--output", type=str, help="Write the report to this file instead of stdout")
    common.add_argument("--seed", type=int, help="Sampling seed (default: RACKFORGE_SEED or config)")

    parser = _Parser(prog="rackforge", description="Leibniz algebras, racks and dirty integration")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify", parents=[common], help="Check the Leibniz identity and augmentation axioms")
    verify.add_argument("path", help="Algebra file (JSON)")

    analyze = sub.add_parser("analyze", parents=[common], help="Squares ideal, left center and quotients")
    analyze.add_argument("path", help="Algebra file (JSON)")

    integrate = sub.add_parser("integrate", parents=[common], help="Build and check the dirty Lie rack")
    integrate.add_argument("path", help="Algebra file (JSON)")
    integrate.add_argument("--model", type=str, help="Group model: nilpotent-bch, e2-cover or matrix-local")
    integrate.add_argument("--tau-prime", type=float, help="Cutoff plateau radius (default pi/2)")
    integrate.add_argument("--tau", type=float, help="Cutoff support radius (default pi)")
    integrate.add_argument("--samples", type=int, help="Samples per property check (default 256)")
    integrate.add_argument("--step", type=float, help="Finite-difference step (default 1e-3)")
    integrate.add_argument("--tol", type=float, help="Defect tolerance (default 1e-9)")

    strip = sub.add_parser("strip", parents=[common], help="Eigenvalue strip verdicts and cutoff values")
    strip.add_argument("path", help="Algebra file with elements and/or matrices (JSON)")
    strip.add_argument("--tau", type=float, help="Strip half-width (default pi)")
    strip.add_argument("--tau-prime", type=float, help="Cutoff plateau radius (default min(pi/2, tau/2))")
    strip.add_argument("--model", type=str, help="Also check the exponential chart of this group model")

    rackcheck = sub.add_parser("rackcheck", parents=[common], help="Rack axioms and tangent bracket of a construction")
    rackcheck.add_argument("path", help="Algebra file (JSON)")
    rackcheck.add_argument("--construction", required=True, type=str,
                           help=f"One of: {', '.join(CONSTRUCTIONS)}")
    rackcheck.add_argument("--samples", type=int, help="Sampled triples (default 256)")
    rackcheck.add_argument("--gauge-factor", type=float, help="Scalar of the gauge map y -> factor * y")
    rackcheck.add_argument("--model", type=str, help="Group model for the conjugation and dirty constructions")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = RackforgeConfig(args.config)
    logging.basicConfig(
        level=getattr(logging, args.log_level or settings.log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    logger.info(f"rackforge {__version__}: {args.command} {args.path}")

    try:
        report = COMMANDS[args.command](args, settings)
    except RackforgeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT
    except (ValidationError, json.JSONDecodeError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT

    write_report(report, args.output)
    code = exit_code(report)
    if code == EXIT_VIOLATION:
        failed = [c.name for c in report.body.checks if not c.passed]
        logger.warning(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    return code


if __name__ == "__main__":
    sys.exit(main())
