import argparse
import logging
import sys
from contextlib import redirect_stderr
from typing import List, Optional, TextIO

from handlers import commands_router
from handlers.router import EXIT_FAILURE, EXIT_INPUT, NEGATIVE_NUMBER, Router
from utils.config import settings
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

# Register routers
router = Router()
router.include_router(commands_router)


def configure_logging(level: Optional[str] = None):
    """Logging configuration; diagnostics go to stderr so stdout stays machine-readable"""
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def build_parser() -> argparse.ArgumentParser:
    # Flags shared by every subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--log-level", default=None, help="override LOG_LEVEL")
    common.add_argument("--max-slots", type=int, default=None,
                        help="size guard on d^(n-1) coefficient slots")
    common.add_argument("--trial-limit", type=int, default=None,
                        help="trial-division prime bound")
    common.add_argument("--rho-iterations", type=int, default=None,
                        help="iteration cap per rho attempt")
    common.add_argument("--oracle-budget", type=int, default=None,
                        help="irreducibility oracle recombination budget")

    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Exact arithmetic dynamics of x^d + c over the rationals",
    )
    parser._negative_number_matcher = NEGATIVE_NUMBER
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    router.configure(subparsers, parents=[common])
    return parser


def dispatch(
    argv: Optional[List[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """
    Parses argv, runs the subcommand and returns the exit code

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])
        stdout: Result stream
        stderr: Diagnostic stream

    Returns:
        int: 0 on success, 2 on input errors, 3 on incomplete computations, 1 otherwise
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed the usage text
        return EXIT_INPUT if e.code else 0

    if args.command is None:
        parser.print_usage(stderr)
        return EXIT_INPUT

    configure_logging(args.log_level)
    try:
        with settings.override(
            iterate_max_slots=args.max_slots,
            factor_trial_limit=args.trial_limit,
            factor_rho_iterations=args.rho_iterations,
            oracle_subset_budget=args.oracle_budget,
        ):
            return router.dispatch(args, stdout, stderr)
    except ConfigError as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except Exception as e:
        logger.critical(f"Critical error: {e}")
        return EXIT_FAILURE


# Start the command line
if __name__ == "__main__":
    try:
        sys.exit(dispatch())
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(EXIT_FAILURE)
