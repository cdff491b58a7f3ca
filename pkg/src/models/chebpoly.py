# src/models/chebpoly.py
"""Exact-rational polynomials stored on the Chebyshev basis.

Coefficients follow the standard one-sided convention f = sum_n u_n T_n.
The symmetric convention (c_0 = u_0, c_n = u_n / 2) used by the recurrence
code is only reachable through ``to_symmetric`` / ``from_symmetric``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, List, Sequence, Tuple, Union

import mpmath

from src.utils.exceptions import InputError

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike) -> Fraction:
    """Parse an int, Fraction or "p/q" string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"not a rational number: {value!r}") from e
    raise InputError(f"not a rational number: {value!r}")


def fraction_to_mpf(value: Fraction):
    """Convert to an mpmath number at the current working precision."""
    return mpmath.mpf(value.numerator) / value.denominator


def _trim(coeffs: List[Fraction]) -> Tuple[Fraction, ...]:
    end = len(coeffs)
    while end > 1 and coeffs[end - 1] == 0:
        end -= 1
    if end == 0:
        return (Fraction(0),)
    return tuple(coeffs[:end])


@dataclass(frozen=True)
class ChebPoly:
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim([as_fraction(c) for c in self.coeffs]))

    # ------------------------------------------------------------------ basics

    @classmethod
    def zero(cls) -> "ChebPoly":
        return cls((0,))

    @classmethod
    def one(cls) -> "ChebPoly":
        return cls((1,))

    @classmethod
    def basis(cls, k: int) -> "ChebPoly":
        """The Chebyshev polynomial T_k."""
        if k < 0:
            raise InputError(f"basis index must be non-negative, got {k}")
        return cls((0,) * k + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def coefficient(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else Fraction(0)

    # -------------------------------------------------------------- arithmetic

    def __add__(self, other: "ChebPoly") -> "ChebPoly":
        size = max(len(self.coeffs), len(other.coeffs))
        return ChebPoly([self.coefficient(n) + other.coefficient(n) for n in range(size)])

    def __neg__(self) -> "ChebPoly":
        return ChebPoly([-c for c in self.coeffs])

    def __sub__(self, other: "ChebPoly") -> "ChebPoly":
        return self + (-other)

    def scale(self, factor: RationalLike) -> "ChebPoly":
        factor = as_fraction(factor)
        return ChebPoly([factor * c for c in self.coeffs])

    def __mul__(self, other: "ChebPoly") -> "ChebPoly":
        return self.mul(other)

    def mul(self, other: "ChebPoly") -> "ChebPoly":
        """Pointwise product via 2 T_i T_j = T_{i+j} + T_{|i-j|}."""
        out = [Fraction(0)] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                half = a * b / 2
                out[i + j] += half
                out[abs(i - j)] += half
        return ChebPoly(out)

    def times_x(self) -> "ChebPoly":
        """Multiply by x = T_1 in O(d)."""
        out = [Fraction(0)] * (self.degree + 2)
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if n == 0:
                out[1] += c
            else:
                out[n + 1] += c / 2
                out[n - 1] += c / 2
        return ChebPoly(out)

    def divrem(self, other: "ChebPoly") -> Tuple["ChebPoly", "ChebPoly"]:
        """Euclidean division self = other * q + r with deg r < deg other.

        Each step cancels the top coefficient a_n with a <- a - 2 a_n / b_m * T_{n-m} * b.
        The factor 2 drops when n = m or when b is a constant.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero Chebyshev polynomial")
        m = other.degree
        lead = other.coeffs[m]
        rem = list(self.coeffs)
        quo = [Fraction(0)] * max(self.degree - m + 1, 1)
        for n in range(self.degree, m - 1, -1):
            top = rem[n]
            if top == 0:
                continue
            k = n - m
            factor = (2 * top if k > 0 and m > 0 else top) / lead
            quo[k] += factor
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                if k == 0:
                    rem[j] -= factor * b
                else:
                    rem[k + j] -= factor * b / 2
                    rem[abs(k - j)] -= factor * b / 2
        rem = rem[:m] if m > 0 else [Fraction(0)]
        return ChebPoly(quo), ChebPoly(rem)

    # -------------------------------------------------------------- calculus

    def antiderivative(self) -> "ChebPoly":
        """Primitive F with F' = f and F(0) = 0."""
        out = [Fraction(0)] * (self.degree + 2)
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if n == 0:
                out[1] += c
            elif n == 1:
                out[2] += c / 4
            else:
                out[n + 1] += c / (2 * (n + 1))
                out[n - 1] -= c / (2 * (n - 1))
        primitive = ChebPoly(out)
        at_zero = primitive.eval(Fraction(0))
        if at_zero == 0:
            return primitive
        return primitive - ChebPoly((at_zero,))

    def derivative(self) -> "ChebPoly":
        d = self.degree
        if d == 0:
            return ChebPoly.zero()
        out = [Fraction(0)] * (d + 2)
        for k in range(d, 0, -1):
            out[k - 1] = out[k + 1] + 2 * k * self.coeffs[k]
        out[0] /= 2
        return ChebPoly(out[:d])

    # ------------------------------------------------------------ evaluation

    def eval(self, x):
        """Clenshaw evaluation; exact for Fractions, also works on mpmath numbers."""
        b1 = b2 = 0
        for u in reversed(self.coeffs[1:]):
            b1, b2 = u + 2 * x * b1 - b2, b1
        return self.coeffs[0] + x * b1 - b2

    def __call__(self, x):
        return self.eval(x)

    def eval_mp(self, x, dps: int = 50):
        """Evaluate at an mpmath (or rational) point with ``dps`` working digits."""
        with mpmath.workdps(dps):
            point = fraction_to_mpf(x) if isinstance(x, Fraction) else mpmath.mpf(x)
            b1 = b2 = mpmath.mpf(0)
            for u in reversed(self.coeffs[1:]):
                b1, b2 = fraction_to_mpf(u) + 2 * point * b1 - b2, b1
            return +(fraction_to_mpf(self.coeffs[0]) + point * b1 - b2)

    def norm_upper(self) -> Fraction:
        """Rational upper bound on the sup norm over [-1, 1]: sum of |u_n|."""
        return sum((abs(c) for c in self.coeffs), Fraction(0))

    def truncate(self, d: int) -> "ChebPoly":
        if d < 0:
            raise InputError(f"truncation degree must be non-negative, got {d}")
        return ChebPoly(self.coeffs[:d + 1])

    # ----------------------------------------------------------- conversions

    def to_monomial(self) -> List[Fraction]:
        out = [Fraction(0)] * (self.degree + 1)
        prev: List[Fraction] = []
        cur = [Fraction(1)]
        for n, c in enumerate(self.coeffs):
            if c != 0:
                for k, t in enumerate(cur):
                    out[k] += c * t
            # T_{n+1} = 2x T_n - T_{n-1}, with T_1 = x
            nxt = [Fraction(0)] + [(2 if n > 0 else 1) * t for t in cur]
            for k, t in enumerate(prev):
                nxt[k] -= t
            prev, cur = cur, nxt
        return list(_trim(out))

    @classmethod
    def from_monomial(cls, coeffs: Sequence[RationalLike]) -> "ChebPoly":
        result = cls.zero()
        for c in reversed(list(coeffs)):
            result = result.times_x() + cls((as_fraction(c),))
        return result

    def to_symmetric(self) -> List[Fraction]:
        """Symmetric-convention coefficients c_0..c_d (c_{-n} = c_n implied)."""
        return [self.coeffs[0]] + [c / 2 for c in self.coeffs[1:]]

    @classmethod
    def from_symmetric(cls, coeffs: Iterable[RationalLike]) -> "ChebPoly":
        values = [as_fraction(c) for c in coeffs]
        if not values:
            return cls.zero()
        return cls([values[0]] + [2 * c for c in values[1:]])

    # --------------------------------------------------------- serialization

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[Union[str, int]]) -> "ChebPoly":
        if not isinstance(data, (list, tuple)) or len(data) == 0:
            raise InputError("coefficient list must be a non-empty array")
        return cls([as_fraction(c) for c in data])

    def to_decimal(self, digits: int = 30) -> List[str]:
        if digits < 1:
            raise InputError(f"digits must be at least 1, got {digits}")
        with mpmath.workdps(digits + 10):
            return [mpmath.nstr(fraction_to_mpf(c), digits) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"ChebPoly({', '.join(str(c) for c in self.coeffs)})"
