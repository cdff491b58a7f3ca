# src/services/chebrec.py
"""Chebyshev recurrence operators of differential operators.

Recurrence operators live in Q(n)<S, S^-1> with S f(n) = f(n + 1) S, and act on
symmetric coefficient sequences (c_{-n} = c_n) by (P c)_n = sum_k b_k(n) c_{n+k}.
Multiplication by x is X = (S + S^-1)/2 and integration is I = (S^-1 - S)/(2n).
"""
import logging
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, List, Tuple

from sympy import Poly, QQ
from sympy.polys.fields import field

from src.models.operators import DiffOp, RecOp
from src.services.oreops import left_normal_form
from src.utils.exceptions import InputError, InternalInvariantError
from src.utils.polynomials import format_poly, n, poly_coeffs, poly_eval, poly_from_coeffs, to_fraction

logger = logging.getLogger(__name__)

RATFUNC, _N_FIELD = field("n", QQ)
_N = RATFUNC.ring.gens[0]


def _shift(f, k: int):
    """f(n) -> f(n + k)."""
    if k == 0 or f.numer.is_ground and f.denom.is_ground:
        return f
    return RATFUNC.new(f.numer.compose(_N, _N + k), f.denom.compose(_N, _N + k))


def _to_poly(f) -> Poly:
    if not f.denom.is_ground:
        raise InternalInvariantError(f"coefficient {f.as_expr()} is not a polynomial in n")
    return Poly(f.as_expr(), n, domain=QQ)


def _from_poly(p: Poly):
    return RATFUNC(p.as_expr())


class SkewLaurent:
    """Finite sum of f_k(n) S^k with f_k rational functions of n."""

    def __init__(self, terms: Dict[int, object] = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def scalar(cls, value) -> "SkewLaurent":
        return cls({0: RATFUNC(value)})

    @classmethod
    def shift(cls, k: int = 1) -> "SkewLaurent":
        return cls({k: RATFUNC.one})

    def __add__(self, other: "SkewLaurent") -> "SkewLaurent":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, RATFUNC.zero) + v
        return SkewLaurent(out)

    def __mul__(self, other: "SkewLaurent") -> "SkewLaurent":
        # (f S^a)(g S^b) = f g(n + a) S^(a + b)
        out: Dict[int, object] = {}
        for a, f in self.terms.items():
            for b, g in other.terms.items():
                out[a + b] = out.get(a + b, RATFUNC.zero) + f * _shift(g, a)
        return SkewLaurent(out)

    def left_scale(self, f) -> "SkewLaurent":
        return SkewLaurent({k: f * v for k, v in self.terms.items()})

    def __pow__(self, power: int) -> "SkewLaurent":
        result = SkewLaurent.scalar(1)
        for _ in range(power):
            result = result * self
        return result

    def shifts(self) -> List[int]:
        return sorted(self.terms)

    def coeff(self, k: int):
        return self.terms.get(k, RATFUNC.zero)

    def is_polynomial(self) -> bool:
        return all(v.denom.is_ground for v in self.terms.values())

    def coeff_poly(self, k: int) -> Poly:
        return _to_poly(self.coeff(k))

    def apply(self, u: Callable[[int], Fraction], at: int) -> Fraction:
        """(self u)_at; coefficients must be polynomial."""
        return sum(
            (poly_eval(self.coeff_poly(k), at) * u(at + k) for k in self.shifts()),
            Fraction(0),
        )

    def format(self) -> str:
        return ", ".join(f"S^{k}: {format_poly(self.coeff_poly(k), 'n')}" for k in self.shifts())

    def __eq__(self, other) -> bool:
        return isinstance(other, SkewLaurent) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"SkewLaurent({ {k: str(v.as_expr()) for k, v in sorted(self.terms.items())} })"


X_OP = SkewLaurent({1: RATFUNC(QQ(1, 2)), -1: RATFUNC(QQ(1, 2))})
I_OP = SkewLaurent({-1: 1 / (2 * _N_FIELD), 1: -1 / (2 * _N_FIELD)})


def delta(r: int) -> Poly:
    """delta_r(n) = 2^r prod_{i=-r+1}^{r-1} (n - i)."""
    if r < 0:
        raise InputError(f"delta needs r >= 0, got {r}")
    acc = Poly(2 ** r, n, domain=QQ)
    for i in range(-r + 1, r):
        acc = acc * Poly(n - i, n, domain=QQ)
    return acc


def _poly_in_x(coeffs: List[Fraction]) -> SkewLaurent:
    """q(X) by Horner in the multiplication operator."""
    acc = SkewLaurent()
    for c in reversed(coeffs):
        acc = acc * X_OP + SkewLaurent.scalar(QQ(c.numerator, c.denominator))
    return acc


def build_Q(r: int) -> SkewLaurent:
    """Q_r = delta_r(n) I^r (polynomial coefficients)."""
    if r < 0:
        raise InputError(f"build_Q needs r >= 0, got {r}")
    q = (I_OP ** r).left_scale(_from_poly(delta(r)))
    if not q.is_polynomial():
        raise InternalInvariantError(f"delta_{r} I^{r} has non-polynomial coefficients")
    return q


def _raw_recurrence(L: DiffOp) -> SkewLaurent:
    r = L.order
    qs = left_normal_form(L)
    acc = SkewLaurent()
    power = SkewLaurent.scalar(1)
    # sum_{i} I^(r-i) q_i(X), accumulated from i = r downwards
    for i in range(r, -1, -1):
        acc = acc + power * _poly_in_x(poly_coeffs(qs[i]))
        power = power * I_OP
    return acc.left_scale(_from_poly(delta(r)))


def _normalize(raw: SkewLaurent) -> Tuple[int, List[Poly], Fraction]:
    if not raw.terms:
        raise InternalInvariantError("recurrence operator vanished identically")
    polys = {k: _to_poly(v) for k, v in raw.terms.items()}
    s = max(abs(k) for k in polys)
    values = [c for p in polys.values() for c in poly_coeffs(p)]
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    content = 0
    for v in values:
        content = gcd(content, int(v * den))
    factor = Fraction(den, content)
    top = polys.get(s)
    if top is None or top.is_zero:
        raise InternalInvariantError("recurrence operator is not antisymmetric")
    if to_fraction(top.LC()) < 0:
        factor = -factor
    coeffs = []
    for k in range(-s, s + 1):
        p = polys.get(k, Poly(0, n, domain=QQ))
        coeffs.append(poly_from_coeffs([c * factor for c in poly_coeffs(p)], n))
    return s, coeffs, factor


def chebyshev_recurrence(L: DiffOp) -> RecOp:
    """Normalized P = delta_r sum_i I^(r-i) q_i(X) with integer coefficients."""
    s, coeffs, factor = _normalize(_raw_recurrence(L))
    rec = RecOp(s, tuple(coeffs), factor)
    if s > L.order + L.max_degree():
        raise InternalInvariantError(f"half-order {s} exceeds r + max deg a_i")
    logger.debug(f"chebyshev recurrence of {L}: s = {s}, {rec.format()}")
    return rec


def chebyshev_recurrence_pair(L: DiffOp) -> Tuple[RecOp, SkewLaurent]:
    """(P, Q) scaled alike, so that P (y_n) = Q ((L y)_n) on symmetric sequences."""
    rec = chebyshev_recurrence(L)
    q = build_Q(L.order).left_scale(RATFUNC(QQ(rec.normalizer.numerator, rec.normalizer.denominator)))
    return rec, q


def singularities(P: RecOp) -> List[int]:
    """Sorted integer roots n >= s of the trailing coefficient b_{-s}."""
    trailing = P.b(-P.s)
    if trailing.is_zero:
        raise InternalInvariantError("trailing coefficient of the recurrence is zero")
    if trailing.degree() == 0:
        return []
    roots = trailing.ground_roots()
    return sorted(int(root) for root in roots if root.is_Integer and int(root) >= P.s)
