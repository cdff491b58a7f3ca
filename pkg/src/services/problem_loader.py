# src/services/problem_loader.py
"""Problem files and the bundled example catalog."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import mpmath
import sympy
from pydantic import ValidationError

from src.models.chebpoly import ChebPoly, as_fraction
from src.models.operators import DiffOp, IvpProblem
from src.schemas.problem import ProblemSpec
from src.schemas.report import CoefficientFile
from src.services.oreops import rescale_problem
from src.utils.exceptions import InputError
from src.utils.polynomials import x
from src.utils.result_io import ResultIO

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).parent.parent / "templates"


@dataclass
class LoadedProblem:
    spec: ProblemSpec
    ivp: IvpProblem
    scale: Fraction
    center: Fraction

    @property
    def name(self) -> str:
        return self.spec.name or "problem"

    def reference(self, dps: int = 50) -> Optional[Callable]:
        """Closed-form solution as a function of the unit-interval variable, if one is given."""
        if not self.spec.reference:
            return None
        try:
            expr = sympy.sympify(self.spec.reference, locals={"x": x})
        except (sympy.SympifyError, TypeError) as e:
            raise InputError(f"cannot parse reference {self.spec.reference!r}: {e}") from e
        if expr.free_symbols - {x}:
            raise InputError(f"reference may only depend on x, got {sorted(map(str, expr.free_symbols))}")
        func = sympy.lambdify(x, expr, modules="mpmath")
        h = mpmath.mpf(self.scale.numerator) / self.scale.denominator
        m = mpmath.mpf(self.center.numerator) / self.center.denominator
        return lambda at: func(h * mpmath.mpf(at) + m)


def problem_from_dict(data: Dict[str, Any]) -> LoadedProblem:
    try:
        spec = ProblemSpec.model_validate(data)
    except ValidationError as e:
        logger.error(f"invalid problem description: {e}")
        raise InputError(f"invalid problem description: {e}") from e
    op = DiffOp.from_lists(spec.operator)
    if spec.initial_values is not None:
        conditions = [([(1, k, 0)], value) for k, value in enumerate(spec.initial_values)]
    else:
        conditions = [
            ([(term.weight, term.order, term.point) for term in cond.terms], cond.target)
            for cond in spec.conditions
        ]
    a, b = (as_fraction(v) for v in spec.interval)
    ivp = rescale_problem(op, conditions, (a, b))
    logger.info(f"loaded problem {spec.name or '<unnamed>'}: order {op.order} on [{a}, {b}]")
    return LoadedProblem(spec=spec, ivp=ivp, scale=(b - a) / 2, center=(a + b) / 2)


def load_problem(path: str) -> LoadedProblem:
    return problem_from_dict(ResultIO().load_json(path))


def list_examples() -> List[str]:
    return sorted(p.stem for p in TEMPLATE_DIR.glob("*.json"))


def load_example(name: str) -> LoadedProblem:
    path = TEMPLATE_DIR / f"{name}.json"
    if not path.exists():
        raise InputError(f"unknown example {name!r}; available: {', '.join(list_examples())}")
    return load_problem(str(path))


def coefficient_file(poly: ChebPoly, digits: int, **extra) -> CoefficientFile:
    return CoefficientFile(coefficients=poly.to_json(), decimal=poly.to_decimal(digits), **extra)


def load_coefficients(path: str) -> ChebPoly:
    data = ResultIO().load_json(path)
    try:
        parsed = CoefficientFile.model_validate(data)
    except ValidationError as e:
        logger.error(f"invalid coefficient file {path}: {e}")
        raise InputError(f"invalid coefficient file {path}: {e}") from e
    return ChebPoly.from_json(parsed.coefficients)
