# src/utils/balls.py
"""Rigorous complex ball arithmetic over exact dyadic rationals.

A ball is a rational center re + i im with a rational radius. Operations are
exact on centers and widen radii to cover rounding, so the true value always
lies inside the returned ball.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence, Union

import mpmath

Number = Union[int, Fraction]


def _log2_estimate(x: Fraction) -> int:
    return x.numerator.bit_length() - x.denominator.bit_length()


def round_up(x: Fraction, bits: int = 32) -> Fraction:
    """Smallest dyadic with ``bits`` significant bits that is >= x."""
    x = Fraction(x)
    if x == 0:
        return x
    shift = bits - _log2_estimate(abs(x))
    scaled = x * Fraction(2) ** shift
    top = -((-scaled.numerator) // scaled.denominator)
    return Fraction(top) / Fraction(2) ** shift


def round_down(x: Fraction, bits: int = 32) -> Fraction:
    return -round_up(-Fraction(x), bits)


def sqrt_upper(x: Fraction, bits: int = 64) -> Fraction:
    """Rational upper bound on sqrt(x), relative accuracy about 2^-bits."""
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"square root of negative number {x}")
    if x == 0:
        return x
    k = max(bits - _log2_estimate(x) // 2, 0)
    scaled = x * 4 ** k
    root = isqrt(scaled.numerator // scaled.denominator) + 1
    return Fraction(root, 2 ** k)


def sqrt_lower(x: Fraction, bits: int = 64) -> Fraction:
    x = Fraction(x)
    if x <= 0:
        return Fraction(0)
    k = max(bits - _log2_estimate(x) // 2, 0)
    scaled = x * 4 ** k
    return Fraction(isqrt(scaled.numerator // scaled.denominator), 2 ** k)


def mpf_to_fraction(value) -> Fraction:
    """Exact value of a finite mpmath real."""
    value = mpmath.mpf(value)
    if not mpmath.isfinite(value):
        raise ValueError(f"cannot convert {value} to a rational")
    sign, man, exp, _ = value._mpf_
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** exp


def quantize(x: Fraction, prec: int) -> Fraction:
    """Nearest multiple of 2^-prec."""
    scaled = x * 2 ** prec
    return Fraction(round(scaled), 2 ** prec)


@dataclass(frozen=True)
class ComplexBall:
    re: Fraction
    im: Fraction = Fraction(0)
    rad: Fraction = Fraction(0)

    @classmethod
    def exact(cls, value: Number) -> "ComplexBall":
        return cls(Fraction(value), Fraction(0), Fraction(0))

    @classmethod
    def from_mpc(cls, value, rad: Number = 0) -> "ComplexBall":
        value = mpmath.mpc(value)
        return cls(mpf_to_fraction(value.real), mpf_to_fraction(value.imag), Fraction(rad))

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def center_abs_upper(self) -> Fraction:
        return sqrt_upper(self.abs2())

    def abs_upper(self) -> Fraction:
        return self.center_abs_upper() + self.rad

    def abs_lower(self) -> Fraction:
        return max(sqrt_lower(self.abs2()) - self.rad, Fraction(0))

    def contains_zero(self) -> bool:
        return self.abs2() <= self.rad * self.rad

    def __add__(self, other: "ComplexBall") -> "ComplexBall":
        return ComplexBall(self.re + other.re, self.im + other.im, self.rad + other.rad)

    def __neg__(self) -> "ComplexBall":
        return ComplexBall(-self.re, -self.im, self.rad)

    def __sub__(self, other: "ComplexBall") -> "ComplexBall":
        return self + (-other)

    def __mul__(self, other: "ComplexBall") -> "ComplexBall":
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        rad = Fraction(0)
        if self.rad or other.rad:
            rad = (self.center_abs_upper() * other.rad + other.center_abs_upper() * self.rad
                   + self.rad * other.rad)
        return ComplexBall(re, im, rad)

    def scale(self, factor: Number) -> "ComplexBall":
        factor = Fraction(factor)
        return ComplexBall(self.re * factor, self.im * factor, self.rad * abs(factor))

    def inverse(self) -> "ComplexBall":
        """1/z over the ball; |1/z - 1/c| <= r / (|c| (|c| - r))."""
        lower = sqrt_lower(self.abs2())
        if lower <= self.rad:
            raise ZeroDivisionError("ball contains zero")
        norm = self.abs2()
        rad = Fraction(0)
        if self.rad:
            rad = self.rad / (lower * (lower - self.rad))
        return ComplexBall(self.re / norm, -self.im / norm, rad)

    def rounded(self, prec: int) -> "ComplexBall":
        """Round the center to multiples of 2^-prec and compress the radius upwards."""
        re = quantize(self.re, prec)
        im = quantize(self.im, prec)
        err = abs(re - self.re) + abs(im - self.im)
        return ComplexBall(re, im, round_up(self.rad + err))


def horner(coeffs: Sequence[Number], at: ComplexBall, prec: int) -> ComplexBall:
    """Evaluate sum_k coeffs[k] at^k (low-to-high) with rounding after every step."""
    acc = ComplexBall.exact(0)
    for c in reversed(list(coeffs)):
        acc = (acc * at + ComplexBall.exact(c)).rounded(prec)
    return acc


def exact_horner(coeffs: Sequence[Number], re: Fraction, im: Fraction):
    """Exact complex-rational evaluation of a polynomial (low-to-high coefficients)."""
    acc_re, acc_im = Fraction(0), Fraction(0)
    for c in reversed(list(coeffs)):
        acc_re, acc_im = acc_re * re - acc_im * im + c, acc_re * im + acc_im * re
    return acc_re, acc_im


@dataclass(frozen=True)
class Interval:
    """Closed real interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: Number) -> "Interval":
        value = Fraction(value)
        return cls(value, value)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __mul__(self, other: "Interval") -> "Interval":
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    def power(self, k: int) -> "Interval":
        if k == 0:
            return Interval.point(1)
        lo_k, hi_k = self.lo ** k, self.hi ** k
        if k % 2 == 1 or self.lo >= 0:
            return Interval(min(lo_k, hi_k), max(lo_k, hi_k))
        if self.hi <= 0:
            return Interval(hi_k, lo_k)
        return Interval(Fraction(0), max(lo_k, hi_k))

    def mag(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> Fraction:
        """Smallest absolute value over the interval."""
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    def rounded(self, bits: int = 48) -> "Interval":
        return Interval(round_down(self.lo, bits), round_up(self.hi, bits))


def interval_horner(coeffs: Sequence[Number], at: Interval) -> Interval:
    acc = Interval.point(0)
    for c in reversed(list(coeffs)):
        acc = (acc * at + Interval.point(c)).rounded()
    return acc
