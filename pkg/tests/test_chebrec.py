# tests/test_chebrec.py
import time
from fractions import Fraction

import pytest

from src.models.chebpoly import ChebPoly
from src.models.operators import DiffOp
from src.services.chebrec import (
    build_Q,
    chebyshev_recurrence,
    chebyshev_recurrence_pair,
    delta,
    singularities,
)
from src.services.oreops import apply_operator
from src.utils.exceptions import InputError
from src.utils.polynomials import n, poly_coeffs, poly_from_coeffs, x


def _npoly(*coeffs):
    return poly_from_coeffs(list(coeffs), n)


def _random_op(rng, max_order=3, max_degree=6):
    order = rng.randint(1, max_order)
    coeffs = [[rng.randint(-4, 4) for _ in range(rng.randint(1, max_degree + 1))] for _ in range(order + 1)]
    if all(c == 0 for c in coeffs[-1]):
        coeffs[-1][0] = 1
    return DiffOp.from_lists(coeffs)


def _symmetric_sequence(p: ChebPoly):
    c = p.to_symmetric()
    return lambda k: c[abs(k)] if abs(k) < len(c) else Fraction(0)


def test_delta():
    assert delta(0) == _npoly(1)
    assert delta(1) == _npoly(0, 2)
    assert delta(2) == _npoly(0, -4, 0, 4)
    with pytest.raises(InputError):
        delta(-1)


def test_recurrence_of_exp():
    started = time.perf_counter()
    P = chebyshev_recurrence(DiffOp.from_lists([[-1], [1]]))
    assert time.perf_counter() - started < 1
    assert P.s == 1
    assert P.b(1) == _npoly(1)
    assert P.b(0) == _npoly(0, 2)
    assert P.b(-1) == _npoly(-1)
    assert P.format() == "b_{-1}=-1, b_0=2n, b_1=1"


def test_recurrence_of_gaussian_type():
    P = chebyshev_recurrence(DiffOp.from_lists([[0, -1], [1]]))
    assert P.s == 2
    assert P.b(2) == _npoly(1)
    assert P.b(0) == _npoly(0, 4)
    assert P.b(-2) == _npoly(-1)
    assert P.b(1).is_zero and P.b(-1).is_zero


def test_recurrence_with_leading_singularity():
    """y'' + (x^2 + 1) y' - x y = 0 has the known recurrence with a singularity at n = 1."""
    P = chebyshev_recurrence(DiffOp.from_lists([[0, -1], [1, 0, 1], [1]]))
    assert P.s == 3
    expected = {
        -3: _npoly(-4, -3, 1),          # (n + 1)(n - 4)
        -1: _npoly(-8, 3, 5),           # (n - 1)(5n + 8)
        0: _npoly(0, -8, 0, 8),         # 8n(n + 1)(n - 1)
        1: _npoly(8, 3, -5),            # -(n + 1)(5n - 8)
        3: _npoly(4, -3, -1),           # -(n - 1)(n + 4)
    }
    for k in range(-3, 4):
        for j in range(-3, 4):
            mine_k, mine_j = P.b(k), P.b(j)
            ref_k = expected.get(k, _npoly(0))
            ref_j = expected.get(j, _npoly(0))
            assert mine_k * ref_j == mine_j * ref_k
    assert P.eval(3, 1) == 0
    assert 4 in singularities(P)


def test_build_Q():
    q0 = build_Q(0)
    assert q0.shifts() == [0]
    assert q0.coeff_poly(0) == _npoly(1)
    q1 = build_Q(1)
    assert q1.shifts() == [-1, 1]
    assert q1.coeff_poly(-1) == _npoly(1)
    assert q1.coeff_poly(1) == _npoly(-1)
    q2 = build_Q(2)
    assert q2.is_polynomial()
    assert q2.shifts() == [-2, 0, 2]


def test_singularities():
    P = chebyshev_recurrence(DiffOp.from_lists([[-1], [1]]))
    assert singularities(P) == []


def test_operator_identity_on_polynomials(rng):
    """P applied to the coefficients of y equals Q applied to those of L y."""
    started = time.perf_counter()
    for _ in range(100):
        L = _random_op(rng)
        y = poly_from_coeffs([rng.randint(-5, 5) for _ in range(rng.randint(1, 7))], x)
        P, Q = chebyshev_recurrence_pair(L)
        u = _symmetric_sequence(ChebPoly.from_monomial(poly_coeffs(y)))
        v = _symmetric_sequence(ChebPoly.from_monomial(poly_coeffs(apply_operator(L, y))))
        for at in range(-15, 16):
            assert P.apply(u, at) == Q.apply(v, at), (str(L), at)
    assert time.perf_counter() - started < 30


def test_structure_invariants(rng):
    for _ in range(30):
        L = _random_op(rng)
        r = L.order
        P = chebyshev_recurrence(L)
        assert P.is_antisymmetric()
        for at in range(1, r):
            assert P.eval(P.s, at) == 0
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(12)]
        u = lambda k: coeffs[abs(k)] if abs(k) < len(coeffs) else Fraction(0)
        for at in range(-(r - 1), r):
            assert P.apply(u, at) == 0


def test_half_order_bound(rng):
    for _ in range(30):
        L = _random_op(rng)
        assert chebyshev_recurrence(L).s <= L.order + L.max_degree()
