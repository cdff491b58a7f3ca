# src/services/ratcheb.py
"""Chebyshev expansions of (rational function) x (polynomial) with certified error.

With x = (z + 1/z)/2 a Chebyshev series becomes a Laurent series in z. The
fraction r/b left after Euclidean division turns into R(z)/beta(z), whose
partial fractions at the roots outside the unit circle give every
symmetric-convention coefficient in closed form:

    c_n = sum_{i, j, zeta} C(n + j - 1, j - 1) h_{i,j}(zeta) zeta^(-n-j).

Roots are enclosed in certified discs and every coefficient carries a rigorous
radius, so the final bound is checked a posteriori rather than assumed.
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from sympy import Poly, QQ

from config import Config
from src.models.chebpoly import ChebPoly, RationalLike, as_fraction
from src.services.oreops import check_nonvanishing
from src.utils.balls import (
    ComplexBall,
    exact_horner,
    horner,
    round_down,
    round_up,
    sqrt_upper,
)
from src.utils.exceptions import DomainError, InputError, RefinementError
from src.utils.polynomials import poly_coeffs, poly_from_coeffs, to_rational, x, z

logger = logging.getLogger(__name__)

INITIAL_RADIUS = Fraction(1, 2 ** 40)
MAX_REFINEMENTS = 4


@dataclass(frozen=True)
class RationalFunction:
    """y = num / den with monomial-basis rational polynomials, reduced, den free of zeros on [-1, 1]."""

    num: Poly
    den: Poly

    def __post_init__(self):
        if self.den.is_zero:
            raise InputError("denominator of a rational function must be nonzero")
        common = self.num.gcd(self.den)
        num, den = self.num, self.den
        if common.degree() > 0:
            num = num.exquo(common)
            den = den.exquo(common)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if not check_nonvanishing(den):
            logger.error(f"denominator {den.as_expr()} vanishes on [-1, 1]")
            raise DomainError(f"denominator {den.as_expr()} has a root in [-1, 1]")

    @classmethod
    def from_lists(cls, num: Sequence[RationalLike], den: Sequence[RationalLike]) -> "RationalFunction":
        return cls(
            poly_from_coeffs([as_fraction(c) for c in num], x),
            poly_from_coeffs([as_fraction(c) for c in den], x),
        )

    @classmethod
    def polynomial(cls, p: Poly) -> "RationalFunction":
        return cls(p, Poly(1, x, domain=QQ))

    def eval(self, at) -> Fraction:
        at = as_fraction(at)
        num = sum((c * at ** k for k, c in enumerate(poly_coeffs(self.num))), Fraction(0))
        den = sum((c * at ** k for k, c in enumerate(poly_coeffs(self.den))), Fraction(0))
        return num / den


@dataclass
class FactorData:
    """One squarefree factor beta_i of beta, its fraction numerators and root enclosures."""

    multiplicity: int
    beta: Poly
    # j -> h_{i,j} as a polynomial in z reduced modulo beta
    h: Dict[int, Poly]
    outer: List[ComplexBall] = field(default_factory=list)
    inner: List[ComplexBall] = field(default_factory=list)


@dataclass
class PartialFractionForm:
    q: ChebPoly
    factors: List[FactorData]
    D: int
    beta: Poly

    def outer_roots(self):
        for factor in self.factors:
            for root in factor.outer:
                yield factor, root

    def max_radius(self) -> Fraction:
        radii = [root.rad for _, root in self.outer_roots()]
        return max(radii) if radii else Fraction(0)

    def rho_minus(self) -> Fraction:
        values = [root.abs_lower() for _, root in self.outer_roots()]
        return min(values) if values else Fraction(0)

    def rho_plus(self) -> Fraction:
        values = [root.abs_upper() for _, root in self.outer_roots()]
        return max(values) if values else Fraction(0)

    def is_polynomial(self) -> bool:
        return not self.factors


@dataclass
class RationalExpansion:
    poly: ChebPoly
    error_bound: Fraction
    tail: Fraction
    coefficient_error: Fraction
    degree: int
    eps_prime: Fraction
    precision: int


# ----------------------------------------------------------------- algebra

def _laurent_image(p: ChebPoly, D: int) -> Poly:
    """z^D p((z + 1/z)/2) as a polynomial in z."""
    coeffs = [Fraction(0)] * (2 * D + 1)
    for k, u in enumerate(p.coeffs):
        if u == 0:
            continue
        coeffs[D + k] += u / 2
        coeffs[D - k] += u / 2
    return poly_from_coeffs(coeffs, z)


def _taylor_shift(p: Poly, modulus: Poly, order: int) -> List[Poly]:
    """Coefficients of u^0..u^(order-1) in p(z + u), reduced modulo ``modulus``."""
    out = []
    deriv = p
    for k in range(order):
        out.append((deriv * to_rational(Fraction(1, factorial(k)))).rem(modulus))
        deriv = deriv.diff(z)
    return out


def _series_mul(a: List[Poly], b: List[Poly], modulus: Poly, order: int) -> List[Poly]:
    out = [Poly(0, z, domain=QQ) for _ in range(order)]
    for i, ai in enumerate(a[:order]):
        if ai.is_zero:
            continue
        for j, bj in enumerate(b[:order - i]):
            out[i + j] = (out[i + j] + ai * bj).rem(modulus)
    return out


def _series_inverse(a: List[Poly], modulus: Poly, order: int) -> List[Poly]:
    head = a[0].invert(modulus)
    out = [head]
    for k in range(1, order):
        acc = Poly(0, z, domain=QQ)
        for l in range(1, k + 1):
            if l < len(a):
                acc = acc + a[l] * out[k - l]
        out.append((-(head * acc)).rem(modulus))
    return out


def _fraction_numerators(R: Poly, beta: Poly, factor: Poly, m: int) -> Dict[int, Poly]:
    """h_{i,j} for j = 1..m at the roots of ``factor`` (multiplicity m in beta).

    Around a root zeta: u^m R / beta = R(zeta+u) / (E(u)^m C(zeta+u)) with
    C = beta / factor^m and factor(zeta+u) = u E(u).
    """
    cofactor = beta.exquo(factor ** m)
    derivs = _taylor_shift(factor, factor, m + 1)
    e_series = derivs[1:]
    den = [Poly(1, z, domain=QQ)]
    for _ in range(m):
        den = _series_mul(den, e_series, factor, m)
    den = _series_mul(den, _taylor_shift(cofactor, factor, m), factor, m)
    g_series = _series_mul(_taylor_shift(R, factor, m), _series_inverse(den, factor, m), factor, m)
    return {j: (g_series[m - j] * (-1) ** j).rem(factor) for j in range(1, m + 1)}


def _decompose(numerator: ChebPoly, den: ChebPoly) -> PartialFractionForm:
    q, rem = numerator.divrem(den)
    D = den.degree
    if rem.is_zero():
        return PartialFractionForm(q=q, factors=[], D=D, beta=Poly(1, z, domain=QQ))
    beta = _laurent_image(den, D)
    R = _laurent_image(rem, D)
    _, parts = beta.sqf_list()
    factors = []
    for factor, m in parts:
        if factor.degree() == 0:
            continue
        factors.append(FactorData(m, factor, _fraction_numerators(R, beta, factor, m)))
    logger.debug(f"beta of degree {beta.degree()} splits into multiplicities {[f.multiplicity for f in factors]}")
    return PartialFractionForm(q=q, factors=factors, D=D, beta=beta)


# ------------------------------------------------------------------- roots

def _bits_for(radius: Fraction) -> int:
    return max(radius.denominator.bit_length() - radius.numerator.bit_length(), 0) + 1


def _approximate_roots(coeffs: List[Fraction], dps: int, start: Optional[List] = None) -> List:
    """Newton-polished numerical roots at ``dps`` digits."""
    with mpmath.workdps(dps):
        mp_coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in coeffs]
        if start is None:
            try:
                with mpmath.workdps(max(30, min(dps, 60))):
                    start = mpmath.polyroots(list(reversed(mp_coeffs)), maxsteps=200, extraprec=60)
            except mpmath.libmp.NoConvergence as e:
                raise RefinementError(f"numerical root finding did not converge: {e}") from e
        deriv = [k * c for k, c in enumerate(mp_coeffs)][1:]
        tolerance = mpmath.mpf(10) ** (-dps + 5)
        roots = []
        for guess in start:
            zeta = mpmath.mpc(guess)
            for _ in range(100):
                step = mpmath.polyval(list(reversed(mp_coeffs)), zeta) / mpmath.polyval(list(reversed(deriv)), zeta)
                zeta -= step
                if abs(step) <= tolerance * max(1, abs(zeta)):
                    break
            roots.append(zeta)
        return roots


def _inclusion_radius(coeffs: List[Fraction], deriv: List[Fraction], re: Fraction, im: Fraction) -> Fraction:
    """deg * |p(c)| / |p'(c)|: some root lies in the disc of this radius around c."""
    p_re, p_im = exact_horner(coeffs, re, im)
    d_re, d_im = exact_horner(deriv, re, im)
    denom = d_re * d_re + d_im * d_im
    if denom == 0:
        raise RefinementError("derivative vanishes at a root approximation")
    ratio = (p_re * p_re + p_im * p_im) / denom
    return round_up((len(coeffs) - 1) * sqrt_upper(ratio))


def certify_roots(beta: Poly, radius: Fraction, start: Optional[List] = None,
                  attempts: int = 3) -> Tuple[List[ComplexBall], List[ComplexBall], List]:
    """Certified disjoint discs of radius <= ``radius`` around every root of a squarefree ``beta``.

    Returns (outer, inner, approximations) with roots classified against the unit circle.
    """
    coeffs = poly_coeffs(beta)
    deriv = [k * c for k, c in enumerate(coeffs)][1:]
    scale = max(abs(c) for c in coeffs) / abs(coeffs[-1])
    target = Fraction(radius)
    for attempt in range(attempts):
        bits = _bits_for(target) + int(scale).bit_length() + 16 + 16 * attempt
        dps = int(bits * 0.30103) + 15
        approx = _approximate_roots(coeffs, dps, start)
        balls = []
        for zeta in approx:
            with mpmath.workdps(dps):
                ball = ComplexBall.from_mpc(zeta)
            ball = ComplexBall(ball.re, ball.im, _inclusion_radius(coeffs, deriv, ball.re, ball.im))
            balls.append(ball)
        ok = all(ball.rad <= target for ball in balls) and _disjoint(balls)
        outer, inner, ambiguous = _classify(balls)
        if ok and not ambiguous:
            return outer, inner, approx
        logger.debug(f"root certification attempt {attempt + 1} failed for degree {beta.degree()}; refining")
        start = approx
        target = target / 2 ** 16 if ambiguous else target
    logger.error(f"could not certify the roots of {beta.as_expr()} to radius {float(radius):.3g}")
    raise RefinementError(f"root certification failed for {beta.as_expr()}")


def _disjoint(balls: List[ComplexBall]) -> bool:
    for a_idx, a in enumerate(balls):
        for b in balls[a_idx + 1:]:
            dist2 = (a.re - b.re) ** 2 + (a.im - b.im) ** 2
            if dist2 <= (a.rad + b.rad) ** 2:
                return False
    return True


def _classify(balls: List[ComplexBall]):
    outer, inner, ambiguous = [], [], []
    for ball in balls:
        norm = ball.abs2()
        if norm > (1 + ball.rad) ** 2:
            outer.append(ball)
        elif ball.rad < 1 and norm < (1 - ball.rad) ** 2:
            inner.append(ball)
        else:
            ambiguous.append(ball)
    return outer, inner, ambiguous


def _certify_all(pf: PartialFractionForm, radius: Fraction, workers: int,
                 starts: Optional[Dict[int, List]] = None) -> Dict[int, List]:
    """Fill outer/inner enclosures of every factor; returns the approximations by factor index."""
    starts = starts or {}
    approximations: Dict[int, List] = {}

    def run(idx: int):
        return idx, certify_roots(pf.factors[idx].beta, radius, starts.get(idx))

    indices = range(len(pf.factors))
    if workers > 1 and len(pf.factors) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(run, idx) for idx in indices]
            results = [future.result() for future in as_completed(futures)]
    else:
        results = [run(idx) for idx in indices]
    for idx, (outer, inner, approx) in sorted(results, key=lambda item: item[0]):
        pf.factors[idx].outer = outer
        pf.factors[idx].inner = inner
        approximations[idx] = approx

    for factor in pf.factors:
        if len(factor.outer) != len(factor.inner):
            raise RefinementError("roots of beta do not come in reciprocal pairs")
    total = sum(f.multiplicity * len(f.outer) for f in pf.factors)
    if total != pf.D:
        raise RefinementError(f"found {total} roots outside the unit circle, expected {pf.D}")
    return approximations


# ------------------------------------------------------------ public API

def partial_fractions(y: RationalFunction, f: Optional[ChebPoly] = None,
                      radius: Fraction = INITIAL_RADIUS, workers: Optional[int] = None) -> PartialFractionForm:
    """Partial fraction form of f*y in the Laurent variable, roots certified to ``radius``."""
    f = f or ChebPoly.one()
    workers = Config.workers() if workers is None else workers
    numerator = ChebPoly.from_monomial(poly_coeffs(y.num)) * f
    den = ChebPoly.from_monomial(poly_coeffs(y.den))
    pf = _decompose(numerator, den)
    if pf.factors:
        _certify_all(pf, radius, workers)
    return pf


def _default_prec(pf: PartialFractionForm) -> int:
    return max(64, _bits_for(pf.max_radius() or INITIAL_RADIUS) + 32)


def _h_values(pf: PartialFractionForm, prec: int) -> List[Tuple[int, ComplexBall, ComplexBall]]:
    """(j, h_{i,j}(zeta), 1/zeta) for every outer root and every j."""
    out = []
    for factor, root in pf.outer_roots():
        inv = root.inverse().rounded(prec)
        for j, h in factor.h.items():
            if h.is_zero:
                continue
            out.append((j, horner(poly_coeffs(h), root, prec), inv))
    return out


def _power(ball: ComplexBall, e: int, prec: int) -> ComplexBall:
    result = ComplexBall.exact(1)
    base = ball
    while e:
        if e & 1:
            result = (result * base).rounded(prec)
        base = (base * base).rounded(prec)
        e >>= 1
    return result


def cheb_coeff(pf: PartialFractionForm, n: int, prec: Optional[int] = None) -> Tuple[Fraction, Fraction]:
    """Symmetric-convention coefficient c_n as (center, radius); the imaginary residue is folded into the radius."""
    if n < 0:
        raise InputError(f"coefficient index must be non-negative, got {n}")
    prec = prec or _default_prec(pf)
    poly_part = pf.q.to_symmetric()
    acc = ComplexBall.exact(poly_part[n] if n < len(poly_part) else 0)
    for j, h_val, inv in _h_values(pf, prec):
        term = (h_val * _power(inv, n + j, prec)).rounded(prec)
        acc = acc + term.scale(comb(n + j - 1, j - 1))
    return acc.re, acc.rad + abs(acc.im)


def _geometric_tail(rho: Fraction, j: int, d: int) -> Fraction:
    """Upper bound of sum_{n > d} C(n + j - 1, j - 1) rho^-n for rho > 1."""
    inv = 1 / rho
    whole = (1 - inv) ** -j
    theta = Fraction(d + 1 + j, d + 2) * inv
    if theta >= 1:
        return whole
    first = comb(d + j, j - 1) * inv ** (d + 1)
    return min(whole, first / (1 - theta))


def _tail_terms(pf: PartialFractionForm, prec: int) -> List[Tuple[int, Fraction, Fraction]]:
    """(j, |h| upper bound, |zeta| lower bound) per outer root, rounded outward."""
    terms = []
    for j, h_val, inv in _h_values(pf, prec):
        rho = round_down(1 / inv.abs_upper())
        terms.append((j, round_up(h_val.abs_upper()), rho))
    return terms



def tail_bound(pf: PartialFractionForm, d: int, prec: Optional[int] = None) -> Fraction:
    """Rigorous bound on the sup norm of sum_{n > d} u_n T_n."""
    if d < pf.q.degree and not pf.q.is_zero():
        raise InputError(f"tail degree {d} below the polynomial part degree {pf.q.degree}")
    prec = prec or _default_prec(pf)
    total = Fraction(0)
    for j, h_abs, rho in _tail_terms(pf, prec):
        if rho <= 1:
            raise RefinementError("root enclosure touches the unit circle")
        total += 2 * h_abs * rho ** -j * _geometric_tail(rho, j, d)
    return round_up(total)


def _scan_degree(pf: PartialFractionForm, budget: Fraction, prec: int, limit: int = 100000) -> int:
    """Smallest d >= deg q with tail_bound(d) <= budget (incremental outward-rounded powers)."""
    terms = _tail_terms(pf, prec)
    start = pf.q.degree if not pf.q.is_zero() else 0
    if not terms:
        return start
    # per term: rho^-(d+1), kept as upward-rounded dyadic
    powers = [round_up((1 / rho) ** (start + 1)) for _, _, rho in terms]
    d = start
    while d < limit:
        total = Fraction(0)
        for (j, h_abs, rho), pw in zip(terms, powers):
            inv = 1 / rho
            theta = Fraction(d + 1 + j, d + 2) * inv
            if theta >= 1:
                piece = (1 - inv) ** -j
            else:
                piece = min((1 - inv) ** -j, comb(d + j, j - 1) * pw / (1 - theta))
            total += 2 * h_abs * inv ** j * piece
        if total <= budget:
            return d
        powers = [round_up(pw / rho) for pw, (_, _, rho) in zip(powers, terms)]
        d += 1
    raise RefinementError(f"no degree up to {limit} reaches tail bound {float(budget):.3g}")


def _majorant(p: Poly, radius: Fraction) -> Fraction:
    return sum((abs(c) * radius ** k for k, c in enumerate(poly_coeffs(p))), Fraction(0))


def _eps_prime(pf: PartialFractionForm, eps: Fraction) -> Fraction:
    """min(rho_- - 1, M^-1 (1 - 1/rho_-)^(D+1) eps / 4)."""
    rho_minus = pf.rho_minus()
    rho_plus = pf.rho_plus()
    M = Fraction(0)
    for factor in pf.factors:
        for j, h in factor.h.items():
            sup_h = _majorant(h, rho_plus)
            sup_dh = _majorant(h.diff(z), rho_plus)
            M += factor.beta.degree() * (sup_dh + sup_h / rho_minus) * rho_minus ** -j
    M = max(M, Fraction(1))
    eps_prime = min(rho_minus - 1, (1 - 1 / rho_minus) ** (pf.D + 1) * eps / (4 * M))
    return round_up(eps_prime, 16) if eps_prime > 0 else INITIAL_RADIUS


def expand_rational(y: RationalFunction, f: ChebPoly, eps: RationalLike,
                    workers: Optional[int] = None) -> RationalExpansion:
    """Polynomial p with ||p - f y|| <= eps on [-1, 1] and the certificate behind it."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise InputError(f"tolerance must be positive, got {eps}")
    workers = Config.workers() if workers is None else workers
    numerator = ChebPoly.from_monomial(poly_coeffs(y.num)) * f
    den = ChebPoly.from_monomial(poly_coeffs(y.den))
    pf = _decompose(numerator, den)
    if pf.is_polynomial():
        logger.debug("denominator divides the product exactly; expansion is exact")
        return RationalExpansion(pf.q, Fraction(0), Fraction(0), Fraction(0), pf.q.degree, Fraction(0), 0)

    approximations = _certify_all(pf, INITIAL_RADIUS, workers)
    eps_prime = min(_eps_prime(pf, eps), INITIAL_RADIUS)
    extra = 0
    for refinement in range(MAX_REFINEMENTS + 1):
        if pf.max_radius() > eps_prime:
            approximations = _certify_all(pf, eps_prime, workers, approximations)
        coarse = _bits_for(eps_prime) + 16
        degree = _scan_degree(pf, eps / 4, coarse)
        prec = _bits_for(eps) + (degree + 2).bit_length() + 24 + extra
        coefficients, coefficient_error = _coefficients(pf, degree, prec)
        if coefficient_error <= eps / 2:
            tail = tail_bound(pf, degree, coarse)
            poly = ChebPoly.from_symmetric(coefficients)
            logger.debug(
                f"rational expansion: degree {degree}, eps' ~ 2^-{_bits_for(eps_prime)}, "
                f"coefficient error {float(coefficient_error):.3g}, tail {float(tail):.3g}"
            )
            return RationalExpansion(
                poly=poly, error_bound=round_up(tail + coefficient_error), tail=tail,
                coefficient_error=coefficient_error, degree=degree,
                eps_prime=eps_prime, precision=prec,
            )
        logger.info(
            f"coefficient error {float(coefficient_error):.3g} above eps/2, refinement {refinement + 1}"
        )
        eps_prime = eps_prime / 2 ** 32
        extra += 32
    raise RefinementError(f"rational expansion did not reach tolerance {float(eps):.3g}")


def _coefficients(pf: PartialFractionForm, degree: int, prec: int) -> Tuple[List[Fraction], Fraction]:
    """Symmetric coefficients c_0..c_degree and the bound rad_0 + 2 sum rad_n on their error."""
    poly_part = pf.q.to_symmetric()
    sums = [ComplexBall.exact(poly_part[n] if n < len(poly_part) else 0) for n in range(degree + 1)]
    for j, h_val, inv in _h_values(pf, prec):
        power = (h_val * _power(inv, j, prec)).rounded(prec)
        for n in range(degree + 1):
            sums[n] = sums[n] + power.scale(comb(n + j - 1, j - 1))
            power = (power * inv).rounded(prec)
    centers = [ball.re for ball in sums]
    radii = [ball.rad + abs(ball.im) for ball in sums]
    error = radii[0] + 2 * sum(radii[1:], Fraction(0))
    return centers, round_up(error)


def expand_product(y: RationalFunction, f: ChebPoly, eps: RationalLike) -> ChebPoly:
    """Polynomial within eps of f*y in sup norm over [-1, 1]."""
    return expand_rational(y, f, eps).poly

