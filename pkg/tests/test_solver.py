# tests/test_solver.py
import time
from fractions import Fraction

import pytest

from src.models.chebpoly import ChebPoly
from src.models.operators import BoundaryCondition, ConditionTerm, DiffOp, IvpProblem
from src.services import solver
from src.services.chebrec import chebyshev_recurrence
from src.services.solver import (
    approximate,
    condition_basis_values,
    eval_condition,
    minimax_lower_estimate,
    near_minimax_factor,
)
from src.utils.exceptions import DomainError, InputError, SingularSystemError

from tests.conftest import bessel_i, sup_error


def test_polynomial_solution_is_exact():
    ivp = IvpProblem.with_initial_values(DiffOp.from_lists([[0], [0], [1]]), [0, 1])
    output = approximate(ivp, 5)
    assert output.poly == ChebPoly.basis(1)


def test_quadratic_solution_of_third_order_equation_is_exact():
    ivp = IvpProblem.with_initial_values(DiffOp.from_lists([[0], [0], [0], [1]]), [-1, 0, 4])
    output = approximate(ivp, 6)
    assert output.poly == ChebPoly.basis(2)


def test_exp_coefficients_match_bessel_values(exp_problem):
    output = approximate(exp_problem, 15, N=30)
    assert output.N_used == 30
    for k in range(13):
        expected = bessel_i(k) * (1 if k == 0 else 2)
        assert abs(output.poly.coefficient(k) - expected) < Fraction(1, 10 ** 12)


def test_small_start_index_is_raised(exp_problem):
    output = approximate(exp_problem, 10, N=3)
    assert output.N_used >= 10
    assert output.poly.degree <= 10


def test_negative_degree_rejected(exp_problem):
    with pytest.raises(InputError):
        approximate(exp_problem, -1)


def test_singular_leading_coefficient_rejected():
    ivp = IvpProblem.with_initial_values(DiffOp.from_lists([[1], [0, 1]]), [1])
    with pytest.raises(DomainError):
        approximate(ivp, 5)


def test_parallel_unrolling_matches_sequential(order_four_problem):
    sequential = approximate(order_four_problem, 12, N=20, workers=1)
    parallel = approximate(order_four_problem, 12, N=20, workers=4)
    assert sequential.poly == parallel.poly


def test_recurrence_holds_below_start_index(exp_problem):
    output = approximate(exp_problem, 10, N=25, keep_full=True)
    P = chebyshev_recurrence(exp_problem.op)
    full = output.full
    u = lambda k: full[abs(k)] if abs(k) < len(full) else Fraction(0)
    for at in range(exp_problem.op.order, output.N_used - P.s + 1):
        assert P.apply(u, at) == 0
    for cond in exp_problem.conditions:
        assert eval_condition(cond, ChebPoly.from_symmetric(full)) == cond.target


def test_retry_after_singular_system(exp_problem, monkeypatch):
    original = solver._solve_once
    calls = []

    def flaky(ivp, P, singular, d, N, workers, keep_full):
        calls.append(N)
        if len(calls) == 1:
            raise SingularSystemError("forced", start_index=N)
        return original(ivp, P, singular, d, N, workers, keep_full)

    monkeypatch.setattr(solver, "_solve_once", flaky)
    output = approximate(exp_problem, 10, N=20, max_retries=3)
    assert output.retries == 1
    assert calls == [20, 21]
    assert output.N_used == 21


def test_retry_gives_up(exp_problem, monkeypatch):
    def always_singular(ivp, P, singular, d, N, workers, keep_full):
        raise SingularSystemError("forced", start_index=N)

    monkeypatch.setattr(solver, "_solve_once", always_singular)
    monkeypatch.setenv("DFC_MAX_RETRIES", "2")
    with pytest.raises(SingularSystemError) as excinfo:
        approximate(exp_problem, 10, N=20)
    assert excinfo.value.start_index == 22


def test_eval_condition_examples():
    value_at_zero = BoundaryCondition.initial(0, 0)
    slope_at_zero = BoundaryCondition.initial(1, 0)
    assert eval_condition(value_at_zero, ChebPoly.basis(2)) == -1
    assert eval_condition(slope_at_zero, ChebPoly.basis(1)) == 1
    mixed = BoundaryCondition(
        (ConditionTerm(1, 0, Fraction(1, 2)), ConditionTerm(2, 1, Fraction(-1, 2))), 0
    )
    # T_3 = 4x^3 - 3x: T_3(1/2) = -1 and T_3'(-1/2) = 12/4 - 3 = 0
    assert eval_condition(mixed, ChebPoly.basis(3)) == -1


def test_condition_basis_values_match_direct_evaluation():
    cond = BoundaryCondition(
        (ConditionTerm(3, 0, Fraction(1, 3)), ConditionTerm(-1, 2, Fraction(-3, 4))), 0
    )
    values = condition_basis_values(cond, 12)
    for k, value in enumerate(values):
        assert value == eval_condition(cond, ChebPoly.basis(k))


def test_minimax_helpers():
    assert near_minimax_factor(0) == pytest.approx(5)
    assert near_minimax_factor(30) > 5
    full = [Fraction(1), Fraction(1, 2), Fraction(-1, 4), Fraction(1, 8)]
    assert minimax_lower_estimate(full, 1) == Fraction(1, 4)
    assert minimax_lower_estimate(full, 3) == 0


@pytest.mark.slow
@pytest.mark.parametrize("fixture, reference, table_error", [
    ("hyperexp_problem", "hyperexp", 3.4e-52),
    ("order_four_problem", "order_four", 5.9e-44),
    ("cos_quadratic_problem", "cos_quadratic", 1.6e-9),
])
def test_reference_problems_degree_30(request, references, fixture, reference, table_error):
    ivp = request.getfixturevalue(fixture)
    output = approximate(ivp, 30)
    error = sup_error(output.poly, references[reference])
    assert table_error / 10 <= error <= table_error * 10


@pytest.mark.slow
def test_unrolling_time_grows_subquadratically(order_four_problem):
    timings = []
    for N in (200, 400, 800):
        started = time.perf_counter()
        approximate(order_four_problem, 30, N=N)
        timings.append(time.perf_counter() - started)
    assert timings[1] / timings[0] <= 3
    assert timings[2] / timings[1] <= 3
