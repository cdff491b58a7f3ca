# src/utils/polynomials.py
"""Conversions between Fraction coefficient lists and sympy polynomials."""
from fractions import Fraction
from typing import List, Sequence

import sympy
from sympy import Poly, QQ

x, t, n, z = sympy.symbols("x t n z")


def to_rational(value) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def poly_from_coeffs(coeffs: Sequence, gen=x) -> Poly:
    """Build a QQ polynomial from low-to-high coefficients."""
    values = [to_rational(c) for c in coeffs] or [sympy.Integer(0)]
    return Poly(list(reversed(values)), gen, domain=QQ)


def poly_coeffs(p: Poly) -> List[Fraction]:
    """Low-to-high Fraction coefficients, at least one entry."""
    if p.is_zero:
        return [Fraction(0)]
    return [to_fraction(c) for c in reversed(p.all_coeffs())]


def poly_eval(p: Poly, value) -> Fraction:
    """Exact evaluation at a rational point via Horner on Fractions."""
    value = Fraction(value)
    acc = Fraction(0)
    for c in reversed(poly_coeffs(p)):
        acc = acc * value + c
    return acc


def format_poly(p: Poly, var: str = "n") -> str:
    """Render with descending powers, e.g. "-4n^3 + n" or "2n"."""
    if p.is_zero:
        return "0"
    terms = []
    for power, c in reversed(list(enumerate(poly_coeffs(p)))):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if power == 0:
            body = str(mag)
        else:
            mono = var if power == 1 else f"{var}^{power}"
            body = mono if mag == 1 else f"{mag}{mono}" if mag.denominator == 1 else f"({mag}){mono}"
        terms.append((sign, body))
    first_sign, first_body = terms[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out
