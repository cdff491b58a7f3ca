# src/main.py
import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import json
import logging
import time
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import mpmath
import pandas as pd

from config import Config
from src.models.chebpoly import ChebPoly, as_fraction
from src.models.reports import SolveOutput, ValidationReport, render
from src.schemas.report import SolveReportFile, ValidationReportFile
from src.services.asymptotics import newton_polygon
from src.services.chebrec import chebyshev_recurrence, singularities
from src.services.problem_loader import (
    LoadedProblem,
    coefficient_file,
    list_examples,
    load_coefficients,
    load_example,
    load_problem,
)
from src.services.ratcheb import RationalFunction, expand_rational
from src.services.solver import approximate, minimax_lower_estimate, near_minimax_factor
from src.services.validator import validate, validate_with_eps_search
from src.utils.cli_parser import CLIParser, split_rationals
from src.utils.exceptions import ChebFiniteError, InputError, ValidationInconclusiveError
from src.utils.logger import setup_logger
from src.utils.result_io import ResultIO

logger = logging.getLogger(__name__)

AUTO_EPS_EXTRA_DEGREE = 10


class ChebFiniteApp:
    def __init__(self, log_level: Optional[str] = None, workers: Optional[int] = None, stdout=None):
        setup_logger(log_level=log_level)
        self.workers = workers or Config.workers()
        self.io = ResultIO()
        self.stdout = stdout or sys.stdout

        logger.info("=" * 60)
        logger.info(f"chebfinite initialised (workers = {self.workers})")
        logger.info("=" * 60)

    def _print(self, text: str):
        print(text, file=self.stdout)

    def _problem(self, args) -> LoadedProblem:
        if getattr(args, "example", None):
            return load_example(args.example)
        return load_problem(args.input_path)

    # ---------------------------------------------------------- subcommands

    def cmd_recurrence(self, args) -> int:
        problem = self._problem(args)
        P = chebyshev_recurrence(problem.ivp.op)
        singular = singularities(P)
        data = {"order": P.s, "recurrence": P.format(), "singular_indices": singular}
        if args.polygon:
            polygon = newton_polygon(P)
            data["slopes"] = [str(s) for s in polygon.slopes()]
            data["edges"] = polygon.summary()
        if args.as_json:
            self._print(json.dumps(data, indent=2))
            return 0
        self._print(data["recurrence"])
        self._print(f"singular indices: {singular}")
        if args.polygon:
            self._print(f"slopes: {{{', '.join(data['slopes'])}}}")
            for edge in data["edges"]:
                moduli = ", ".join(f"{m:.6g}" for m in edge["root_moduli"])
                self._print(f"  slope {edge['slope']} on {edge['span']}: |roots| = [{moduli}]")
        return 0

    def cmd_approx(self, args) -> int:
        problem = self._problem(args)
        started = time.perf_counter()
        output = approximate(problem.ivp, args.degree, N=args.start_index,
                             max_retries=args.max_retries, workers=self.workers)
        elapsed = time.perf_counter() - started
        payload = coefficient_file(output.poly, args.digits, degree=args.degree,
                                   N_used=output.N_used, retries=output.retries)
        self.io.save_json(args.out, payload)
        logger.info(f"approximation of degree {args.degree} took {elapsed:.3f} s")
        self._print(f"wrote {args.out} (N = {output.N_used}, retries = {output.retries})")
        return 0

    def _validate(self, problem: LoadedProblem, poly: ChebPoly, eps: Optional[Fraction],
                  args) -> ValidationReport:
        if args.eps_search:
            return validate_with_eps_search(problem.ivp, poly, kernel_subdivisions=args.kernel_subdivisions,
                                            index=args.index)
        if eps is None:
            eps = self.auto_epsilon(problem, poly, max(poly.degree, 1))
            logger.info(f"automatic validation tolerance {float(eps):.3g}")
        return validate(problem.ivp, poly, eps, kernel_subdivisions=args.kernel_subdivisions, index=args.index)

    def _report_file(self, report: ValidationReport, digits: int, status: str = "certified") -> ValidationReportFile:
        return ValidationReportFile(status=status, **report.to_dict(digits))

    def cmd_validate(self, args) -> int:
        problem = self._problem(args)
        poly = load_coefficients(args.poly_path)
        eps = as_fraction(args.eps) if args.eps else None
        try:
            report = self._validate(problem, poly, eps, args)
        except ValidationInconclusiveError as e:
            if args.report and e.report is not None:
                self.io.save_json(args.report, self._report_file(e.report, args.digits, "inconclusive"))
            raise
        report_file = self._report_file(report, args.digits)
        if args.report:
            self.io.save_json(args.report, report_file)
        self._print(f"{render(report.b, args.digits)} <= ||y - p|| <= {render(report.B, args.digits)}")
        return 0

    def auto_epsilon(self, problem: LoadedProblem, poly: ChebPoly, degree: int,
                     tail: Optional[Fraction] = None) -> Fraction:
        """h^2 with h = max(||p_{d+10} - p||, tail, 2^-4d) from a second, higher-degree approximation."""
        finer = approximate(problem.ivp, degree + AUTO_EPS_EXTRA_DEGREE, workers=self.workers)
        heuristic = max((finer.poly - poly).norm_upper(), tail or Fraction(0), Fraction(1, 2 ** (4 * degree)))
        return heuristic * heuristic

    def heuristics(self, output: SolveOutput) -> Dict[str, str]:
        data = {
            "tail_estimate": render(output.tail_estimate),
            "near_minimax_factor": f"{near_minimax_factor(output.degree):.6g}",
        }
        if output.full is not None:
            data["minimax_lower_estimate"] = render(minimax_lower_estimate(output.full, output.degree))
        return data

    def cmd_solve(self, args) -> int:
        problem = self._problem(args)
        timings: Dict[str, float] = {}

        started = time.perf_counter()
        output = approximate(problem.ivp, args.degree, N=args.start_index,
                             max_retries=args.max_retries, workers=self.workers, keep_full=True)
        timings["approx"] = time.perf_counter() - started

        eps_source = "user"
        if args.eps:
            eps = as_fraction(args.eps)
        else:
            started = time.perf_counter()
            eps = self.auto_epsilon(problem, output.poly, args.degree, output.tail_estimate)
            timings["auto_eps"] = time.perf_counter() - started
            eps_source = "auto"
            logger.info(f"automatic validation tolerance {float(eps):.3g}")

        def finish(report: ValidationReport, status: str, error_bound: Optional[str]):
            self.io.save_json(args.out, coefficient_file(
                output.poly, args.digits, degree=args.degree, N_used=output.N_used,
                retries=output.retries, error_bound=error_bound))
            self.io.save_json(args.report, SolveReportFile(
                problem=problem.name, degree=args.degree, N_used=output.N_used,
                retries=output.retries, singular_indices=output.singular,
                epsilon_source=eps_source, timings=timings,
                validation=self._report_file(report, args.digits, status) if report is not None else None,
                heuristics=self.heuristics(output),
            ))

        started = time.perf_counter()
        try:
            report = validate(problem.ivp, output.poly, eps, kernel_subdivisions=args.kernel_subdivisions,
                              index=args.index)
        except ValidationInconclusiveError as e:
            timings["validate"] = time.perf_counter() - started
            finish(e.report, "inconclusive", None)
            raise
        timings["validate"] = time.perf_counter() - started
        finish(report, "certified", str(report.B))
        self._print(f"{render(report.b, args.digits)} <= ||y - p|| <= {render(report.B, args.digits)}")
        return 0

    def sample_nodes(self, count: int, kind: str, dps: int) -> List:
        with mpmath.workdps(dps):
            if kind == "chebyshev":
                # extrema of T_{count-1}, endpoints included
                nodes = [mpmath.sin(mpmath.pi * (2 * k - (count - 1)) / (2 * (count - 1))) for k in range(count)]
            else:
                nodes = [mpmath.mpf(-1) + mpmath.mpf(2 * k) / (count - 1) for k in range(count)]
        return nodes

    def sample_frame(self, poly: ChebPoly, count: int, kind: str, digits: int,
                     reference=None, reference_fn=None) -> pd.DataFrame:
        dps = digits + 10
        rows = []
        for node in self.sample_nodes(count, kind, dps):
            value = poly.eval_mp(node, dps)
            row = {"x": mpmath.nstr(node, digits), "value": mpmath.nstr(value, digits)}
            with mpmath.workdps(dps):
                if reference is not None:
                    row["error"] = mpmath.nstr(value - reference.eval_mp(node, dps), digits)
                elif reference_fn is not None:
                    row["error"] = mpmath.nstr(value - reference_fn(node), digits)
            rows.append(row)
        columns = ["x", "value"] + (["error"] if reference is not None or reference_fn is not None else [])
        return pd.DataFrame(rows, columns=columns)

    def cmd_sample(self, args) -> int:
        poly = load_coefficients(args.poly_path)
        reference = load_coefficients(args.reference_path) if args.reference_path else None
        reference_fn = None
        if reference is None and (args.input_path or args.example):
            reference_fn = self._problem(args).reference(args.digits + 10)
            if reference_fn is None:
                logger.warning("problem has no closed-form reference; sampling values only")
        frame = self.sample_frame(poly, args.sample_count, args.nodes, args.digits, reference, reference_fn)
        if args.out:
            self.io.save_csv(args.out, frame)
        else:
            self._print(frame.to_csv(index=False).rstrip("\n"))
        return 0

    def cmd_expand_rational(self, args) -> int:
        y = RationalFunction.from_lists(split_rationals(args.num), split_rationals(args.den))
        expansion = expand_rational(y, ChebPoly.one(), as_fraction(args.eps), workers=self.workers)
        payload = coefficient_file(expansion.poly, args.digits, degree=expansion.degree,
                                   error_bound=str(expansion.error_bound))
        if args.out:
            self.io.save_json(args.out, payload)
        else:
            self._print(json.dumps(payload.model_dump(exclude_none=True), indent=2))
        return 0

    def cmd_examples(self, args) -> int:
        for name in list_examples():
            self._print(f"{name}: {load_example(name).spec.description or ''}")
        return 0

    def run(self, args) -> int:
        handler = getattr(self, "cmd_" + args.command.replace("-", "_"))
        return handler(args)


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    try:
        args = CLIParser().parse_args(argv)
        app = ChebFiniteApp(log_level=args.log_level, workers=args.workers, stdout=stdout)
        return app.run(args)
    except ChebFiniteError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"unexpected failure: {str(e)}")
        print(f"internal error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
