# src/services/validator.py
"""A posteriori enclosure of the error of a polynomial approximation.

The problem is rewritten as alpha_r(x) y = g + int_0^x K(x, t) y(t) dt. The
operator T(y) = (g + int K y) / alpha_r satisfies ||T^i|| <= A^i / i!, so a few
Picard steps from p bound ||y - p|| from both sides.
"""
import logging
import time
from fractions import Fraction
from math import factorial, isqrt
from typing import List, Optional, Tuple

from config import Config
from src.models.chebpoly import ChebPoly, RationalLike, as_fraction
from src.models.operators import IvpProblem, VolterraSystem
from src.models.reports import ValidationReport
from src.services.oreops import ensure_regular, volterra_system
from src.services.ratcheb import RationalFunction, expand_product, expand_rational
from src.utils.balls import Interval, interval_horner, round_up
from src.utils.exceptions import (
    ContractionError,
    InputError,
    ValidationInconclusiveError,
)
from src.utils.polynomials import poly_coeffs, poly_from_coeffs, x

logger = logging.getLogger(__name__)

GAMMA_TERMS = 4
MAX_INDEX_RAISES = 2


def ceil_sqrt(m: int) -> int:
    root = isqrt(m)
    return root if root * root == m else root + 1


def exp_upper(A: Fraction) -> Fraction:
    """Rational upper bound on e^A for A >= 0."""
    A = Fraction(A)
    if A < 0:
        raise InputError(f"exp_upper expects a non-negative argument, got {A}")
    K = 2 * (A.numerator // A.denominator + 1) + 10
    total, term = Fraction(0), Fraction(1)
    for k in range(K):
        total += term
        term = term * A / (k + 1)
    # term == A^K / K!; the remaining series is dominated by a geometric one
    return round_up(total + term / (1 - A / (K + 1)))


def _reciprocal(vs: VolterraSystem) -> RationalFunction:
    return RationalFunction(poly_from_coeffs([1], x), vs.leading)


def _beta_cheb(vs: VolterraSystem) -> List[ChebPoly]:
    return [ChebPoly.from_monomial(poly_coeffs(beta)) for beta in vs.betas]


def _default_kernel_bound(vs: VolterraSystem, tolerance: Fraction) -> Fraction:
    """sup |1/alpha_r| * sum_j sup |beta_j|, both through Chebyshev coefficient sums."""
    beta_norm = sum((b.norm_upper() for b in _beta_cheb(vs)), Fraction(0))
    if beta_norm == 0:
        return Fraction(0)
    expansion = expand_rational(_reciprocal(vs), ChebPoly.one(), tolerance)
    inverse_norm = expansion.poly.norm_upper() + expansion.error_bound
    return round_up(inverse_norm * beta_norm)


def _subdivided_kernel_bound(vs: VolterraSystem, subdivisions: int) -> Optional[Fraction]:
    """max over boxes of |K|/|alpha_r| on the triangle 0 <= |t| <= |x| <= 1, sign(t) = sign(x).

    Returns None when some box cannot separate alpha_r from zero.
    """
    alpha = poly_coeffs(vs.leading)
    betas = [poly_coeffs(beta) for beta in vs.betas]
    step = Fraction(1, subdivisions)
    best = Fraction(0)
    for sign in (1, -1):
        for a in range(subdivisions):
            ends = sorted((sign * a * step, sign * (a + 1) * step))
            X = Interval(ends[0], ends[1])
            denominator = interval_horner(alpha, X).mig()
            if denominator == 0:
                return None
            powers = [X.power(j) for j in range(len(betas))]
            # t runs over [0, x] (or [x, 0]) for x in X, covered by a + 1 pieces of width 1/m
            for b in range(a + 1):
                t_ends = sorted((sign * b * step, sign * (b + 1) * step))
                T = Interval(t_ends[0], t_ends[1])
                K = Interval.point(0)
                for j, beta in enumerate(betas):
                    K = K + interval_horner(beta, T) * powers[j]
                best = max(best, K.mag() / denominator)
    return round_up(best)


def kernel_bound(vs: VolterraSystem, subdivisions: int = 0,
                 tolerance: Optional[RationalLike] = None) -> Fraction:
    """Rational A >= sup |K(x, t) / alpha_r(x)| over the integration region."""
    A, _ = kernel_bound_with_source(vs, subdivisions, tolerance)
    return A


def kernel_bound_with_source(vs: VolterraSystem, subdivisions: int = 0,
                             tolerance: Optional[RationalLike] = None) -> Tuple[Fraction, str]:
    tolerance = Config.kernel_tolerance() if tolerance is None else as_fraction(tolerance)
    A = _default_kernel_bound(vs, tolerance)
    source = "default"
    if subdivisions > 0 and A > 0:
        tight = _subdivided_kernel_bound(vs, subdivisions)
        if tight is None:
            logger.warning(f"kernel subdivision with {subdivisions} boxes inconclusive; keeping default bound")
        elif tight < A:
            logger.debug(f"subdivision tightened A from {float(A):.4g} to {float(tight):.4g}")
            A, source = tight, f"subdivision-{subdivisions}"
    return A, source


def min_contraction_index(A: RationalLike) -> int:
    """Smallest i >= 1 with A^i / i! <= 1/2."""
    A = as_fraction(A)
    if A < 0:
        raise InputError(f"kernel bound must be non-negative, got {A}")
    i, ratio = 1, A
    while ratio > Fraction(1, 2):
        i += 1
        ratio = ratio * A / i
    return i


def gamma_bound(A: RationalLike, i: int) -> Fraction:
    """Upper bound on sum_j ||T^i||^j, i.e. on ||(1 - T^i)^{-1}||."""
    A = as_fraction(A)
    if i < 1:
        raise InputError(f"contraction index must be at least 1, got {i}")
    rho = A ** i / factorial(i)
    if rho >= 1:
        raise ContractionError(f"A^i/i! = {float(rho):.4g} >= 1 for A = {float(A):.4g}, i = {i}")
    partial = sum((A ** (i * j) / factorial(i * j) for j in range(GAMMA_TERMS)), Fraction(0))
    tail = rho ** GAMMA_TERMS / (1 - rho)
    return min(round_up(partial + tail), round_up(1 / (1 - rho)))


def picard_step(vs: VolterraSystem, p: ChebPoly, eps: Fraction,
                betas: Optional[List[ChebPoly]] = None) -> ChebPoly:
    """Polynomial within eps of (g + int_0^x K(x, t) p(t) dt) / alpha_r."""
    betas = _beta_cheb(vs) if betas is None else betas
    q = ChebPoly.from_monomial(poly_coeffs(vs.g))
    x_power = ChebPoly.one()
    for beta in betas:
        q = q + x_power * (beta * p).antiderivative()
        x_power = x_power.times_x()
    return expand_product(_reciprocal(vs), q, eps)


def _lower_bound(delta: Fraction, D: int, slack: Fraction, rho: Fraction) -> Fraction:
    """(delta / sqrt(2D - 1) - slack) / (1 + rho), with rho >= ||T^i||."""
    return max(Fraction(0), (delta / ceil_sqrt(2 * D - 1) - slack) / (1 + rho))


def validate(ivp: IvpProblem, p: ChebPoly, eps: RationalLike,
             kernel_subdivisions: int = 0, index: Optional[int] = None) -> ValidationReport:
    """Certified b <= ||y - p||_inf <= B on [-1, 1] for the solution y of ``ivp``.

    ``index`` fixes the starting contraction index instead of the smallest i with
    A^i / i! <= 1/2. If no contraction is found after two raises, the error carries
    a report with the lower bound b only.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise InputError(f"tolerance must be positive, got {eps}")
    if index is not None and index < 1:
        raise InputError(f"contraction index must be at least 1, got {index}")
    ensure_regular(ivp.op)
    timings = {}

    started = time.perf_counter()
    vs = volterra_system(ivp)
    A, source = kernel_bound_with_source(vs, kernel_subdivisions)
    timings['kernel'] = time.perf_counter() - started

    i = min_contraction_index(A) if index is None else index
    gamma = None
    for raises in range(MAX_INDEX_RAISES + 1):
        try:
            gamma = gamma_bound(A, i)
            break
        except ContractionError as e:
            if raises == MAX_INDEX_RAISES:
                logger.error(f"{e}; giving up after {MAX_INDEX_RAISES} index raises")
                break
            logger.warning(f"{e}; raising the contraction index")
            i += 1
    logger.info(f"validation parameters: A = {float(A):.4g} ({source}), i = {i}, "
                f"gamma = {float(gamma) if gamma is not None else None}")

    started = time.perf_counter()
    betas = _beta_cheb(vs)
    iterate = p
    for step in range(i):
        iterate = picard_step(vs, iterate, eps, betas)
        logger.debug(f"iterate {step + 1}/{i}: degree {iterate.degree}")
    timings['iterations'] = time.perf_counter() - started

    difference = p - iterate
    delta = difference.norm_upper()
    D = max(difference.degree, 0) + 1
    exp_A = exp_upper(A)
    slack = exp_A * eps
    rho = A ** i / factorial(i)
    b = _lower_bound(delta, D, slack, rho)
    B = None if gamma is None else round_up(gamma * (delta + slack))
    report = ValidationReport(
        B=B, b=b, A=A, i=i, gamma_i=gamma, delta=delta, D=D, epsilon=eps,
        exp_A=exp_A, kernel_source=source, iterate_degree=iterate.degree,
        timings=timings,
    )
    if B is None:
        raise ValidationInconclusiveError(
            f"no contraction for A = {float(A):.4g} after {MAX_INDEX_RAISES} index raises "
            f"(lower bound {float(b):.4g} still holds)",
            report=report,
        )
    logger.info(f"enclosure: {float(b):.4g} <= ||y - p|| <= {float(B):.4g}")
    return report


def validate_with_eps_search(ivp: IvpProblem, p: ChebPoly, max_rounds: int = 6,
                             ratio: int = 1000, kernel_subdivisions: int = 0,
                             index: Optional[int] = None) -> ValidationReport:
    """Validate with eps = 2^-d, squaring eps until B <= ratio * b or rounds run out."""
    eps = Fraction(1, 2 ** max(p.degree, 1))
    report = None
    for round_idx in range(max_rounds):
        report = validate(ivp, p, eps, kernel_subdivisions, index)
        if report.b > 0 and report.B <= ratio * report.b:
            logger.info(f"eps search settled after {round_idx + 1} rounds at eps = 2^-{eps.denominator.bit_length() - 1}")
            return report
        eps = eps * eps
    logger.warning(f"eps search stopped after {max_rounds} rounds without B <= {ratio} b")
    return report
