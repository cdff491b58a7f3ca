# src/services/oreops.py
"""Exact operator algebra on differential operators with polynomial coefficients."""
import logging
from fractions import Fraction
from math import comb, factorial
from typing import List, Sequence, Tuple

import sympy
from sympy import Poly, QQ

from src.models.chebpoly import RationalLike, as_fraction
from src.models.operators import (
    BoundaryCondition,
    ConditionTerm,
    DiffOp,
    IvpProblem,
    VolterraSystem,
)
from src.utils.exceptions import DomainError, InputError, UnsupportedConditionError
from src.utils.polynomials import poly_eval, poly_from_coeffs, t, to_rational, x

logger = logging.getLogger(__name__)


def _diff(p: Poly, times: int) -> Poly:
    for _ in range(times):
        p = p.diff(p.gen)
    return p


def left_normal_form(L: DiffOp) -> List[Poly]:
    """Coefficients q_0..q_r with L = d^r q_r + ... + d q_1 + q_0.

    q_k = sum_{i>=k} (-1)^(i-k) C(i, k) a_i^(i-k), from repeated use of x d = d x - 1.
    """
    r = L.order
    out = []
    for k in range(r + 1):
        acc = Poly(0, x, domain=QQ)
        for i in range(k, r + 1):
            term = _diff(L.coeffs[i], i - k) * (comb(i, k) * (-1) ** (i - k))
            acc = acc + term
        out.append(acc)
    return out


def adjoint_alphas(L: DiffOp) -> List[Poly]:
    return left_normal_form(L)


def expand_left_form(qs: Sequence[Poly]) -> DiffOp:
    """Inverse of left_normal_form: d^k q = sum_j C(k, j) q^(k-j) d^j."""
    r = len(qs) - 1
    coeffs = []
    for j in range(r + 1):
        acc = Poly(0, x, domain=QQ)
        for k in range(j, r + 1):
            acc = acc + _diff(qs[k], k - j) * comb(k, j)
        coeffs.append(acc)
    return DiffOp(tuple(coeffs))


def apply_operator(L: DiffOp, y: Poly) -> Poly:
    """L applied to a polynomial y."""
    acc = Poly(0, x, domain=QQ)
    deriv = y
    for a in L.coeffs:
        acc = acc + a * deriv
        deriv = deriv.diff(x)
    return acc


def check_nonvanishing(a: Poly) -> bool:
    """True iff the polynomial has no real root in [-1, 1] (exact Sturm count)."""
    if a.is_zero:
        raise InputError("the zero polynomial vanishes everywhere")
    if a.degree() == 0:
        return True
    return a.count_roots(-1, 1) == 0


def ensure_regular(L: DiffOp) -> None:
    if not check_nonvanishing(L.leading):
        logger.error(f"leading coefficient {L.leading.as_expr()} vanishes on [-1, 1]")
        raise DomainError(f"leading coefficient {L.leading.as_expr()} vanishes on [-1, 1]")


def initial_values(ivp: IvpProblem) -> List[Fraction]:
    """l_0..l_{r-1} when the conditions are exactly y^(k)(0) = l_k, k = 0..r-1."""
    values = {}
    for cond in ivp.conditions:
        if len(cond.terms) != 1:
            raise UnsupportedConditionError("validation needs single-term initial conditions")
        term = cond.terms[0]
        if term.point != 0 or term.weight == 0:
            raise UnsupportedConditionError(
                f"validation needs conditions at 0, got a term at x = {term.point}"
            )
        if term.order in values or term.order >= ivp.op.order:
            raise UnsupportedConditionError(f"unexpected initial condition of order {term.order}")
        values[term.order] = cond.target / term.weight
    return [values[k] for k in range(ivp.op.order)]


def volterra_system(ivp: IvpProblem) -> VolterraSystem:
    """alpha_r(x) y(x) = g(x) + int_0^x K(x, t) y(t) dt for an initial-value problem at 0."""
    ells = initial_values(ivp)
    alphas = left_normal_form(ivp.op)
    r = ivp.op.order

    betas = []
    for j in range(r):
        acc = Poly(0, t, domain=QQ)
        for i in range(r - j):
            alpha_t = Poly(alphas[r - 1 - j - i].as_expr().subs(x, t), t, domain=QQ)
            factor = to_rational(Fraction((-1) ** (i + 1), factorial(i) * factorial(j)))
            acc = acc + alpha_t * Poly(t ** i, t, domain=QQ) * factor
        betas.append(acc)

    # (d^i (alpha y))(0) = sum_j C(i, j) alpha^(i-j)(0) l_j
    def derivative_at_zero(alpha: Poly, i: int) -> Fraction:
        return sum(
            (comb(i, j) * poly_eval(_diff(alpha, i - j), 0) * ells[j] for j in range(i + 1)),
            Fraction(0),
        )

    g_coeffs = []
    for k in range(r):
        value = sum((derivative_at_zero(alphas[r - k + i], i) for i in range(k + 1)), Fraction(0))
        g_coeffs.append(value / factorial(k))
    g = poly_from_coeffs(g_coeffs or [0], x)

    logger.debug(f"volterra system: alpha_r = {alphas[-1].as_expr()}, g = {g.as_expr()}")
    return VolterraSystem(tuple(alphas), tuple(betas), g)


def kernel_reference(vs: VolterraSystem) -> sympy.Expr:
    """K(x, t) = -sum_k (x - t)^k / k! alpha_{r-1-k}(t), expanded."""
    r = len(vs.alpha) - 1
    acc = sympy.Integer(0)
    for k in range(r):
        alpha_t = vs.alpha[r - 1 - k].as_expr().subs(x, t)
        acc -= (x - t) ** k / sympy.factorial(k) * alpha_t
    return sympy.expand(acc)


def _affine(interval: Sequence[RationalLike]) -> Tuple[Fraction, Fraction]:
    a, b = (as_fraction(v) for v in interval)
    if a >= b:
        raise InputError(f"interval [{a}, {b}] is empty")
    return (b - a) / 2, (a + b) / 2


def rescale_to_unit(L: DiffOp, interval: Sequence[RationalLike]) -> DiffOp:
    """Operator annihilating y(h x + m), h = (b - a)/2, m = (a + b)/2."""
    h, m = _affine(interval)
    if h == 1 and m == 0:
        return L
    r = L.order
    shift = Poly(to_rational(h) * x + to_rational(m), x, domain=QQ)
    coeffs = tuple(a.compose(shift) * to_rational(h ** (r - i)) for i, a in enumerate(L.coeffs))
    return DiffOp(coeffs)


def rescale_problem(op: DiffOp,
                    conditions: Sequence[Tuple[Sequence[Tuple[RationalLike, int, RationalLike]], RationalLike]],
                    interval: Sequence[RationalLike] = (-1, 1)) -> IvpProblem:
    """Build a problem on [-1, 1] from an operator and conditions stated on ``interval``.

    Each term (mu, k, p) becomes (mu h^-k, k, (p - m)/h).
    """
    h, m = _affine(interval)
    a, b = m - h, m + h
    mapped = []
    for terms, target in conditions:
        new_terms = []
        for weight, order, point in terms:
            point = as_fraction(point)
            if not a <= point <= b:
                raise InputError(f"condition point {point} lies outside [{a}, {b}]")
            new_terms.append(ConditionTerm(as_fraction(weight) / h ** order, order, (point - m) / h))
        mapped.append(BoundaryCondition(tuple(new_terms), target))
    return IvpProblem(rescale_to_unit(op, interval), tuple(mapped))
