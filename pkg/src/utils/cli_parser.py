# src/utils/cli_parser.py
import argparse
import logging
import os
from typing import List, Optional, Sequence

from config import Config
from src.utils.exceptions import InputError

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises InputError instead of exiting."""

    def error(self, message):
        raise InputError(message)


class CLIParser:
    """Command-line parser for the chebfinite subcommands."""

    def __init__(self):
        self.parser = _Parser(
            prog="chebfinite",
            description="Validated Chebyshev approximation of D-finite functions",
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        self.parser.add_argument("--log-level", dest="log_level", default=None,
                                 help="logging level (default from DFC_LOG_LEVEL)")
        self.parser.add_argument("--workers", dest="workers", type=int, default=None,
                                 help="thread count for independent sub-computations")
        self.subparsers = self.parser.add_subparsers(dest="command", parser_class=_Parser)
        self._setup_arguments()

    def _add_problem(self, sub, required: bool = True):
        group = sub.add_mutually_exclusive_group(required=required)
        group.add_argument("-i", "--input", dest="input_path", type=str, help="problem JSON file")
        group.add_argument("-e", "--example", dest="example", type=str, help="bundled example name")

    def _add_index(self, sub):
        sub.add_argument("--index", type=int, default=None,
                         help="starting contraction index (smallest i with A^i/i! <= 1/2 when omitted)")

    def _add_digits(self, sub):
        sub.add_argument("--digits", type=int, default=Config.digits(), help="digits of decimal renderings")

    def _setup_arguments(self):
        sub = self.subparsers.add_parser("recurrence", help="print the Chebyshev recurrence of the operator")
        self._add_problem(sub)
        sub.add_argument("--polygon", action="store_true", help="also print the Newton polygon")
        sub.add_argument("--json", dest="as_json", action="store_true", help="print JSON instead of text")

        sub = self.subparsers.add_parser("approx", help="compute a degree-d approximation")
        self._add_problem(sub)
        sub.add_argument("-d", "--degree", type=int, required=True)
        sub.add_argument("-N", "--start-index", dest="start_index", type=int, default=None,
                         help="start index of the backward recurrence (automatic when omitted)")
        sub.add_argument("--max-retries", dest="max_retries", type=int, default=None)
        sub.add_argument("-o", "--out", dest="out", type=str, default="coeffs.json")
        self._add_digits(sub)

        sub = self.subparsers.add_parser("validate", help="certify the error of a polynomial approximation")
        self._add_problem(sub)
        sub.add_argument("-p", "--poly", dest="poly_path", type=str, required=True, help="coefficient JSON file")
        sub.add_argument("--eps", type=str, default=None, help="rational tolerance of the Picard iterates")
        sub.add_argument("--eps-search", dest="eps_search", action="store_true",
                         help="search eps starting from 2^-d instead of using --eps")
        sub.add_argument("--kernel-subdivisions", dest="kernel_subdivisions", type=int, default=0)
        self._add_index(sub)
        sub.add_argument("-r", "--report", dest="report", type=str, default=None)
        self._add_digits(sub)

        sub = self.subparsers.add_parser("solve", help="approximate and validate")
        self._add_problem(sub)
        sub.add_argument("-d", "--degree", type=int, required=True)
        sub.add_argument("-N", "--start-index", dest="start_index", type=int, default=None)
        sub.add_argument("--max-retries", dest="max_retries", type=int, default=None)
        sub.add_argument("--eps", type=str, default=None, help="validation tolerance (automatic when omitted)")
        sub.add_argument("--kernel-subdivisions", dest="kernel_subdivisions", type=int, default=0)
        self._add_index(sub)
        sub.add_argument("-o", "--out", dest="out", type=str, default="coeffs.json")
        sub.add_argument("-r", "--report", dest="report", type=str, default="report.json")
        self._add_digits(sub)

        sub = self.subparsers.add_parser("sample", help="export polynomial values as CSV")
        sub.add_argument("-p", "--poly", dest="poly_path", type=str, required=True)
        self._add_problem(sub, required=False)
        sub.add_argument("--reference", dest="reference_path", type=str, default=None,
                         help="coefficient file subtracted from p to give an error column")
        sub.add_argument("-n", "--count", dest="sample_count", type=int, default=101)
        sub.add_argument("--nodes", choices=["chebyshev", "uniform"], default="uniform")
        sub.add_argument("-o", "--out", dest="out", type=str, default=None, help="CSV file (stdout when omitted)")
        self._add_digits(sub)

        sub = self.subparsers.add_parser("expand-rational", help="certified Chebyshev expansion of num/den")
        sub.add_argument("--num", type=str, required=True, help="comma-separated monomial coefficients, low to high")
        sub.add_argument("--den", type=str, required=True)
        sub.add_argument("--eps", type=str, required=True)
        sub.add_argument("-o", "--out", dest="out", type=str, default=None)
        self._add_digits(sub)

        self.subparsers.add_parser("examples", help="list bundled example problems")

    def parse_args(self, argv: Optional[Sequence[str]] = None):
        args = self.parser.parse_args(argv)
        if not args.command:
            raise InputError("a subcommand is required; see --help")
        if getattr(args, "degree", 1) < 1:
            raise InputError(f"degree must be positive, got {args.degree}")
        if getattr(args, "digits", 1) < 1:
            raise InputError(f"digits must be at least 1, got {args.digits}")
        if getattr(args, "sample_count", 2) < 2:
            raise InputError(f"sample count must be at least 2, got {args.sample_count}")
        if getattr(args, "index", None) is not None and args.index < 1:
            raise InputError(f"contraction index must be at least 1, got {args.index}")
        if getattr(args, "kernel_subdivisions", 0) < 0:
            raise InputError("kernel subdivisions must be non-negative")
        if args.workers is not None and args.workers < 1:
            raise InputError(f"worker count must be positive, got {args.workers}")
        for attr in ("input_path", "poly_path", "reference_path"):
            path = getattr(args, attr, None)
            if path and not os.path.exists(path):
                logger.error(f"file does not exist: {path}")
                raise InputError(f"file does not exist: {path}")
        return args


def split_rationals(text: str) -> List[str]:
    values = [part.strip() for part in text.split(",") if part.strip()]
    if not values:
        raise InputError(f"expected comma-separated rationals, got {text!r}")
    return values
