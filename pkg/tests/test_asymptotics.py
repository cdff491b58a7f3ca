# tests/test_asymptotics.py
import math
from fractions import Fraction

import pytest

from src.models.operators import DiffOp, RecOp
from src.services.asymptotics import (
    choose_N,
    choose_N_auto,
    convergent_growth,
    growth_roots,
    log_of,
    newton_polygon,
)
from src.services.chebrec import chebyshev_recurrence, singularities


@pytest.fixture
def exp_rec():
    return chebyshev_recurrence(DiffOp.from_lists([[-1], [1]]))


def test_polygon_of_exp(exp_rec):
    polygon = newton_polygon(exp_rec)
    assert set(polygon.points) == {(-1, 0), (0, -1), (1, 0)}
    assert polygon.slopes() == [-1, 1]
    left = polygon.edges[0]
    assert left.chi == (-1, 2)
    assert left.roots() == pytest.approx([0.5])


def test_single_horizontal_edge():
    P = RecOp.from_lists([[1, 1], [0, 3], [2, -1]])
    polygon = newton_polygon(P)
    assert polygon.slopes() == [0]
    assert polygon.total_degree() == 2


def test_arctan_type_roots_are_reciprocal():
    P = chebyshev_recurrence(DiffOp.from_lists([[0], [0, 2], [4, 0, 1]]))
    horizontal = [e for e in newton_polygon(P).edges if e.slope == 0]
    assert horizontal
    moduli = sorted(abs(z) for e in horizontal for z in e.roots())
    assert all(abs(m - 1) > 1e-6 for m in moduli)
    for m in moduli:
        assert any(abs(m * other - 1) < 1e-9 for other in moduli)


def test_convergent_growth(exp_rec):
    kappa, modulus = convergent_growth(exp_rec)
    assert kappa == -1
    assert modulus == pytest.approx(0.5)


def test_convergent_growth_of_gaussian_type():
    # kappa = -1/2 here: u_n decays like (n/2)!^-1, i.e. n!^(-1/2) up to geometric factors
    P = chebyshev_recurrence(DiffOp.from_lists([[0, -1], [1]]))
    kappa, modulus = convergent_growth(P)
    assert kappa == Fraction(-1, 2)
    assert modulus == pytest.approx(0.5)


def test_constant_leading_coefficient_decays():
    P = chebyshev_recurrence(DiffOp.from_lists([[-1], [0], [0], [0], [1]]))
    kappa, _ = convergent_growth(P)
    assert kappa < 0


def test_growth_symmetry(rng):
    for _ in range(20):
        order = rng.randint(1, 3)
        coeffs = [[rng.randint(-4, 4) for _ in range(rng.randint(1, 4))] for _ in range(order + 1)]
        coeffs[-1] = [rng.randint(1, 4)] + coeffs[-1][1:]
        P = chebyshev_recurrence(DiffOp.from_lists(coeffs))
        slopes = sorted(newton_polygon(P).slopes())
        assert slopes == sorted(-s for s in slopes)
        roots = growth_roots(P)
        assert len(roots) == 2 * P.s
        for g in roots:
            mirror = [h for h in roots if h.kappa == -g.kappa]
            assert any(abs(g.modulus * h.modulus - 1) < 1e-6 for h in mirror)


def test_choose_N_defaults(exp_rec):
    assert choose_N(exp_rec, 10) == 11
    assert choose_N(exp_rec, 10, 1) == 11


def test_choose_N_for_target(exp_rec):
    N = choose_N(exp_rec, 10, Fraction(1, 10 ** 30))
    assert N == 24
    # direct enumeration of the smallest N with 2^-N / N! <= 1e-30
    expected = next(k for k in range(11, 100) if -k * math.log(2) - math.lgamma(k + 1) <= -30 * math.log(10))
    assert N == expected


def test_choose_N_respects_singularities():
    P = chebyshev_recurrence(DiffOp.from_lists([[0, -1], [1, 0, 1], [1]]))
    floor = max([2] + singularities(P)) + P.s
    assert choose_N(P, 2) >= floor


def test_choose_N_auto_exceeds_degree(exp_rec):
    assert choose_N_auto(exp_rec, 20) > 20


def test_log_of_tiny_rational():
    assert log_of(Fraction(1, 10 ** 400)) == pytest.approx(-400 * math.log(10))
