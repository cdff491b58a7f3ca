# tests/test_chebpoly.py
from fractions import Fraction

import mpmath
import pytest
import sympy

from src.models.chebpoly import ChebPoly, as_fraction
from src.utils.exceptions import InputError

T = ChebPoly.basis
xs = sympy.Symbol("x")


def _monomial_expr(p: ChebPoly):
    return sum(sympy.Rational(c.numerator, c.denominator) * xs ** k for k, c in enumerate(p.to_monomial()))


def _random_poly(rng, degree):
    return ChebPoly([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(degree + 1)])


@pytest.mark.parametrize("p, at, expected", [
    (T(2), 0, -1),
    (ChebPoly([1, 1]), 1, 2),
    (T(3), Fraction(1, 2), -1),
])
def test_eval(p, at, expected):
    assert p.eval(Fraction(at)) == expected


def test_mul_examples():
    assert T(1) * T(1) == ChebPoly([Fraction(1, 2), 0, Fraction(1, 2)])
    assert T(2) * T(3) == ChebPoly([0, Fraction(1, 2), 0, 0, 0, Fraction(1, 2)])
    p = ChebPoly([3, -1, 4])
    assert ChebPoly.one() * p == p


def test_mul_matches_monomial_product(rng):
    for _ in range(20):
        a = _random_poly(rng, rng.randint(0, 12))
        b = _random_poly(rng, rng.randint(0, 12))
        product = sympy.expand(_monomial_expr(a) * _monomial_expr(b))
        assert sympy.expand(_monomial_expr(a * b) - product) == 0


def test_divrem_examples():
    q, r = T(2).divrem(T(1))
    assert q == ChebPoly([0, 2])
    assert r == ChebPoly([-1])

    p = ChebPoly([1, 2, 3])
    q, r = p.divrem(p)
    assert q == ChebPoly.one()
    assert r.is_zero()

    a = T(3) + T(1)
    q, r = a.divrem(T(2))
    assert r.degree <= 1
    assert T(2) * q + r == a


def test_divrem_random_identity(rng):
    for _ in range(20):
        a = _random_poly(rng, rng.randint(0, 10))
        b = _random_poly(rng, rng.randint(0, 5))
        if b.is_zero():
            continue
        q, r = a.divrem(b)
        assert b * q + r == a
        assert r.degree < b.degree or r.is_zero()


def test_divrem_by_constant_scales(rng):
    q, r = T(1).divrem(ChebPoly.one())
    assert q == T(1)
    assert r.is_zero()
    for _ in range(10):
        a = _random_poly(rng, rng.randint(1, 8))
        c = Fraction(rng.randint(1, 9), rng.randint(1, 5)) * rng.choice([-1, 1])
        q, r = a.divrem(ChebPoly([c]))
        assert q == a.scale(1 / c)
        assert r.is_zero()


def test_divrem_by_zero():
    with pytest.raises(ZeroDivisionError):
        T(2).divrem(ChebPoly.zero())


def test_antiderivative_examples():
    assert T(1).antiderivative() == ChebPoly([Fraction(1, 4), 0, Fraction(1, 4)])
    assert T(0).antiderivative() == T(1)
    F = T(2).antiderivative()
    assert F.derivative() == T(2)
    assert F.eval(Fraction(0)) == 0


def test_antiderivative_random(rng):
    for _ in range(20):
        f = _random_poly(rng, rng.randint(0, 15))
        F = f.antiderivative()
        assert F.derivative() == f
        assert F.eval(Fraction(0)) == 0


def test_derivative_examples():
    assert T(1).derivative() == T(0)
    assert T(0).derivative().is_zero()
    expected = ChebPoly.from_monomial([-3, 0, 12])
    assert T(3).derivative() == expected


def test_norm_upper():
    assert ChebPoly([1, 1]).norm_upper() == 2
    assert ChebPoly.zero().norm_upper() == 0
    p = T(0) - T(2)
    assert p.norm_upper() == 2
    assert p.eval(Fraction(0)) == 2


def test_truncate():
    assert (T(0) + T(5)).truncate(3) == T(0)
    p = ChebPoly([1, 2, 3])
    assert p.truncate(p.degree) == p
    assert (T(1) + T(2) + T(3)).truncate(2) == T(1) + T(2)
    with pytest.raises(InputError):
        p.truncate(-1)


def test_monomial_conversions(rng):
    assert T(2).to_monomial() == [-1, 0, 2]
    assert T(0).to_monomial() == [1]
    assert T(4).to_monomial() == [1, 0, -8, 0, 8]
    for _ in range(10):
        p = _random_poly(rng, rng.randint(0, 12))
        assert ChebPoly.from_monomial(p.to_monomial()) == p


def test_symmetric_convention():
    p = ChebPoly([1, 2, 4])
    assert p.to_symmetric() == [1, 1, 2]
    assert ChebPoly.from_symmetric([1, 1, 2]) == p


def test_json_round_trip():
    p = ChebPoly([Fraction(1, 3), Fraction(-7, 2), 0, Fraction(5, 11)])
    data = p.to_json()
    assert data == ["1/3", "-7/2", "0", "5/11"]
    assert ChebPoly.from_json(data) == p


def test_to_decimal():
    assert ChebPoly([Fraction(1, 3)]).to_decimal(5) == ["0.33333"]
    with pytest.raises(InputError):
        ChebPoly.one().to_decimal(0)


def test_eval_mp_matches_exact():
    p = ChebPoly([Fraction(1, 3), 2, Fraction(-5, 7)])
    exact = p.eval(Fraction(1, 4))
    approx = p.eval_mp(Fraction(1, 4), dps=40)
    with mpmath.workdps(40):
        assert abs(approx - mpmath.mpf(exact.numerator) / exact.denominator) < mpmath.mpf(10) ** -35


@pytest.mark.parametrize("bad", ["abc", "1/0", True, 1.5, None])
def test_as_fraction_rejects(bad):
    with pytest.raises(InputError):
        as_fraction(bad)


def test_trailing_zeros_are_trimmed():
    assert ChebPoly([1, 2, 0, 0]).degree == 1
    assert ChebPoly([0, 0]).is_zero()
