# src/models/operators.py
"""Differential operators, conditions, problems and recurrence operators."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

import sympy
from sympy import Poly

from src.models.chebpoly import RationalLike, as_fraction
from src.utils.exceptions import InputError
from src.utils.polynomials import format_poly, n, poly_coeffs, poly_from_coeffs, x


@dataclass(frozen=True)
class DiffOp:
    """L = sum_i a_i(x) d^i with monomial-basis rational polynomial coefficients."""

    coeffs: Tuple[Poly, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise InputError("a differential operator needs at least one coefficient")
        if self.coeffs[-1].is_zero:
            raise InputError("leading coefficient a_r must not be identically zero")

    @classmethod
    def from_lists(cls, coeffs: Sequence[Sequence[RationalLike]]) -> "DiffOp":
        return cls(tuple(poly_from_coeffs([as_fraction(c) for c in a], x) for a in coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Poly:
        return self.coeffs[-1]

    def max_degree(self) -> int:
        return max(0 if a.is_zero else a.degree() for a in self.coeffs)

    def to_lists(self) -> List[List[Fraction]]:
        return [poly_coeffs(a) for a in self.coeffs]

    def __str__(self) -> str:
        parts = []
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            parts.append(f"({format_poly(a, 'x')})*D^{i}")
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class ConditionTerm:
    weight: Fraction
    order: int
    point: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "point", as_fraction(self.point))
        if not isinstance(self.order, int) or self.order < 0:
            raise InputError(f"derivative order must be a non-negative integer, got {self.order!r}")


@dataclass(frozen=True)
class BoundaryCondition:
    """lambda(y) = sum_j mu_j y^(r_j)(x_j) = target."""

    terms: Tuple[ConditionTerm, ...]
    target: Fraction

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "target", as_fraction(self.target))
        if not self.terms:
            raise InputError("a condition needs at least one term")
        for term in self.terms:
            if abs(term.point) > 1:
                raise InputError(f"condition point {term.point} lies outside [-1, 1]")

    @classmethod
    def initial(cls, order: int, value: RationalLike) -> "BoundaryCondition":
        """The condition y^(order)(0) = value."""
        return cls((ConditionTerm(Fraction(1), order, Fraction(0)),), value)

    def max_order(self) -> int:
        return max(term.order for term in self.terms)


@dataclass(frozen=True)
class IvpProblem:
    op: DiffOp
    conditions: Tuple[BoundaryCondition, ...]

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        if len(self.conditions) != self.op.order:
            raise InputError(
                f"operator of order {self.op.order} needs {self.op.order} conditions, "
                f"got {len(self.conditions)}"
            )
        for cond in self.conditions:
            if cond.max_order() > self.op.order:
                raise InputError(f"condition uses derivative order above {self.op.order}")

    @classmethod
    def with_initial_values(cls, op: DiffOp, values: Sequence[RationalLike]) -> "IvpProblem":
        return cls(op, tuple(BoundaryCondition.initial(k, v) for k, v in enumerate(values)))


@dataclass(frozen=True)
class VolterraSystem:
    """alpha_r(x) y(x) = g(x) + int_0^x K(x, t) y(t) dt with K = sum_j beta_j(t) x^j."""

    alpha: Tuple[Poly, ...]
    betas: Tuple[Poly, ...]
    g: Poly

    def kernel_expr(self) -> sympy.Expr:
        return sympy.expand(sum((b.as_expr() * x ** j for j, b in enumerate(self.betas)), sympy.Integer(0)))

    @property
    def leading(self) -> Poly:
        return self.alpha[-1]


@dataclass(frozen=True)
class RecOp:
    """P = sum_{k=-s}^{s} b_k(n) S^k acting by (P u)_n = sum_k b_k(n) u_{n+k}.

    ``coeffs[k + s]`` holds b_k; ``normalizer`` is the rational factor applied to
    the raw construction to reach integer coefficients with positive lc(b_s).
    """

    s: int
    coeffs: Tuple[Poly, ...]
    normalizer: Fraction = Fraction(1)
    _int_coeffs: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.coeffs) != 2 * self.s + 1:
            raise InputError(f"recurrence of half-order {self.s} needs {2 * self.s + 1} coefficients")
        packed = []
        for b in self.coeffs:
            values = poly_coeffs(b)
            if any(v.denominator != 1 for v in values):
                packed.append(None)
            else:
                packed.append(tuple(int(v) for v in values))
        object.__setattr__(self, "_int_coeffs", tuple(packed))

    @classmethod
    def from_lists(cls, coeffs: Sequence[Sequence[RationalLike]]) -> "RecOp":
        s = (len(coeffs) - 1) // 2
        return cls(s, tuple(poly_from_coeffs([as_fraction(c) for c in b], n) for b in coeffs))

    def b(self, k: int) -> Poly:
        return self.coeffs[k + self.s]

    def degrees(self) -> Dict[int, int]:
        """Shift -> degree for the nonzero coefficients."""
        return {k: self.b(k).degree() for k in range(-self.s, self.s + 1) if not self.b(k).is_zero}

    def eval_int(self, k: int, at: int) -> int:
        """b_k(at) for integer coefficients (Horner on Python ints)."""
        packed = self._int_coeffs[k + self.s]
        if packed is None:
            raise InputError("recurrence coefficients are not integral")
        acc = 0
        for c in reversed(packed):
            acc = acc * at + c
        return acc

    def eval(self, k: int, at) -> Fraction:
        acc = Fraction(0)
        for c in reversed(poly_coeffs(self.b(k))):
            acc = acc * at + c
        return acc

    def apply(self, u: Callable[[int], Fraction], at: int) -> Fraction:
        """(P u)_at for a sequence given as a callable on integer indices."""
        return sum((self.eval(k, at) * u(at + k) for k in range(-self.s, self.s + 1)), Fraction(0))

    def is_antisymmetric(self) -> bool:
        """b_{-k}(-n) == -b_k(n) for every k."""
        for k in range(-self.s, self.s + 1):
            mirrored = self.b(-k).compose(Poly(-n, n))
            if not (mirrored + self.b(k)).is_zero:
                return False
        return True

    def format(self) -> str:
        return ", ".join(
            f"{_label(k)}={format_poly(self.b(k), 'n')}"
            for k in range(-self.s, self.s + 1)
            if not self.b(k).is_zero
        )

    def __str__(self) -> str:
        return self.format()


def _label(k: int) -> str:
    return f"b_{{{k}}}" if k < 0 else f"b_{k}"
