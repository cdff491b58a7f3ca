# tests/conftest.py
import random
from fractions import Fraction

import mpmath
import pytest

from src.models.chebpoly import ChebPoly
from src.models.operators import DiffOp, IvpProblem


def sup_error(p: ChebPoly, reference, nodes: int = 2001, dps: int = 120) -> mpmath.mpf:
    """max |p(x) - reference(x)| over equispaced nodes of [-1, 1], at ``dps`` digits."""
    worst = mpmath.mpf(0)
    with mpmath.workdps(dps):
        for k in range(nodes):
            at = mpmath.mpf(-1) + mpmath.mpf(2 * k) / (nodes - 1)
            worst = max(worst, abs(p.eval_mp(at, dps) - reference(at)))
    return worst


def bessel_i(nu: int, terms: int = 40) -> Fraction:
    """I_nu(1) by its power series, to far beyond double precision."""
    total = Fraction(0)
    for k in range(terms):
        fact_k = 1
        for j in range(2, k + 1):
            fact_k *= j
        fact_nk = 1
        for j in range(2, nu + k + 1):
            fact_nk *= j
        total += Fraction(1, 2 ** (nu + 2 * k) * fact_k * fact_nk)
    return total


@pytest.fixture
def rng():
    return random.Random(20240518)


@pytest.fixture
def exp_problem():
    """y' = y, y(0) = 1."""
    return IvpProblem.with_initial_values(DiffOp.from_lists([[-1], [1]]), [1])


@pytest.fixture
def hyperexp_problem():
    """2(x+16) y' - (x+15) y = 0, y(0) = 1/4; solution e^(x/2) / sqrt(x + 16)."""
    op = DiffOp.from_lists([[-15, -1], [32, 2]])
    return IvpProblem.with_initial_values(op, [Fraction(1, 4)])


@pytest.fixture
def order_four_problem():
    """y'''' = y with solution (3 cos x - sin x) / 2."""
    op = DiffOp.from_lists([[-1], [0], [0], [0], [1]])
    values = [Fraction(3, 2), Fraction(-1, 2), Fraction(-3, 2), Fraction(1, 2)]
    return IvpProblem.with_initial_values(op, values)


@pytest.fixture
def cos_quadratic_problem():
    """(2x^2+1) y'' + 8x y' + (2x^2+5) y = 0 with solution cos x / (2x^2 + 1)."""
    op = DiffOp.from_lists([[5, 0, 2], [0, 8], [1, 0, 2]])
    return IvpProblem.with_initial_values(op, [1, 0])


@pytest.fixture
def references():
    return {
        "exp": mpmath.exp,
        "hyperexp": lambda x: mpmath.exp(x / 2) / mpmath.sqrt(x + 16),
        "order_four": lambda x: (3 * mpmath.cos(x) - mpmath.sin(x)) / 2,
        "cos_quadratic": lambda x: mpmath.cos(x) / (2 * x ** 2 + 1),
    }
