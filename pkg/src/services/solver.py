# src/services/solver.py
"""Backward-recurrence (Miller-type) computation of Chebyshev approximations.

For each index i of I = S u [N, N + s - 1] a test sequence f_i is unrolled from
the top with the Chebyshev recurrence; the solution is the combination of the
f_i that satisfies the conditions and the recurrence relations the unrolling
skipped. Sequences are carried as integers scaled by the product of the
b_{-s}(n) divisors so every backward step is an exact integer division.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence

from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from config import Config
from src.models.chebpoly import ChebPoly
from src.models.operators import BoundaryCondition, IvpProblem, RecOp
from src.models.reports import SolveOutput
from src.services.asymptotics import choose_N_auto
from src.services.chebrec import chebyshev_recurrence, singularities
from src.services.oreops import ensure_regular
from src.utils.exceptions import InputError, InternalInvariantError, SingularSystemError
from src.utils.linalg import solve_exact

logger = logging.getLogger(__name__)


def condition_basis_values(cond: BoundaryCondition, count: int) -> List[Fraction]:
    """lambda(T_n) for 0 <= n < count.

    Uses T_{n+1}^(k) = 2x T_n^(k) + 2k T_n^(k-1) - T_{n-1}^(k) (halved at n = 0).
    """
    out = [Fraction(0)] * count
    for term in cond.terms:
        order, x0, weight = term.order, term.point, term.weight
        # prev[k], cur[k] hold T_{n-1}^(k)(x0), T_n^(k)(x0) for k <= order
        prev = [Fraction(0)] * (order + 1)
        cur = [Fraction(1)] + [Fraction(0)] * order
        for n_idx in range(count):
            out[n_idx] += weight * cur[order]
            scale = 1 if n_idx == 0 else 2
            nxt = [scale * x0 * cur[0] - prev[0]]
            for k in range(1, order + 1):
                nxt.append(scale * (x0 * cur[k] + k * cur[k - 1]) - prev[k])
            prev, cur = cur, nxt
    return out


def eval_condition(cond: BoundaryCondition, p: ChebPoly) -> Fraction:
    """sum_j mu_j p^(r_j)(x_j), exactly."""
    total = Fraction(0)
    for term in cond.terms:
        q = p
        for _ in range(term.order):
            q = q.derivative()
        total += term.weight * q.eval(term.point)
    return total


class _Unroller:
    """Backward unrolling of the integer-scaled test sequences for one start index."""

    def __init__(self, P: RecOp, N: int, singular: Sequence[int]):
        self.P = P
        self.N = N
        self.s = P.s
        self.index_set = sorted(set(singular) | set(range(N, N + P.s)))
        self.skipped = set(self.index_set)
        top = N + self.s - 1
        # b_k(n) for s <= n <= N + s - 1
        self.table = {
            at: [P.eval_int(k, at) for k in range(-self.s, self.s + 1)]
            for at in range(self.s, top + 1)
        }
        scale = 1
        for at in range(self.s, top + 1):
            if at in self.skipped:
                continue
            divisor = self.table[at][0]
            if divisor == 0:
                logger.error(f"b_(-s)({at}) = 0 outside the singular set {list(singular)}")
                raise InternalInvariantError(f"trailing coefficient vanishes at n = {at}, not in the singular set")
            scale *= divisor
        self.scale = scale

    def unroll(self, i: int) -> List[int]:
        """Sequence Delta * f_i on indices 0..N-1 (zero above)."""
        s, N = self.s, self.N
        seq = [0] * (N + 2 * s + 1)
        for at in range(N + s - 1, s - 1, -1):
            target = at - s
            if at == i:
                seq[target] = self.scale
            elif at in self.skipped:
                seq[target] = 0
            else:
                row = self.table[at]
                acc = 0
                for k in range(1, 2 * s + 1):
                    value = seq[target + k]
                    if value:
                        acc += row[k] * value
                if acc == 0:
                    continue
                quotient, remainder = divmod(-acc, row[0])
                if remainder:
                    raise InternalInvariantError(f"inexact backward step at n = {at} for sequence {i}")
                seq[target] = quotient
        return seq[:N]


def _symmetric(seq: Sequence, idx: int):
    idx = abs(idx)
    return seq[idx] if idx < len(seq) else 0


def _recurrence_row(P: RecOp, seq: Sequence[int], at: int) -> int:
    return sum(P.eval_int(k, at) * _symmetric(seq, at + k) for k in range(-P.s, P.s + 1))


def _condition_row(values: Sequence[Fraction], seq: Sequence[int]) -> Fraction:
    # function value uses standard weights: c_0 T_0 + 2 sum c_n T_n
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    acc = 0
    for n_idx, c in enumerate(seq):
        if c:
            weight = 1 if n_idx == 0 else 2
            acc += weight * c * int(values[n_idx] * den)
    return Fraction(acc, den)


def _solve_once(ivp: IvpProblem, P: RecOp, singular: List[int], d: int, N: int,
                workers: int, keep_full: bool) -> SolveOutput:
    r = ivp.op.order
    unroller = _Unroller(P, N, singular)
    index_set = unroller.index_set
    logger.debug(f"unrolling {len(index_set)} test sequences from N = {N}")

    sequences: Dict[int, List[int]] = {}
    if workers > 1 and len(index_set) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(unroller.unroll, i): i for i in index_set}
            for future in as_completed(futures):
                sequences[futures[future]] = future.result()
    else:
        for i in index_set:
            sequences[i] = unroller.unroll(i)

    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for cond in ivp.conditions:
        values = condition_basis_values(cond, N)
        rows.append([_condition_row(values, sequences[i]) for i in index_set])
        rhs.append(cond.target)
    # relations skipped by the unrolling; at singular indices this restores them
    for at in sorted(set(range(r, P.s)) | set(singular)):
        rows.append([Fraction(_recurrence_row(P, sequences[i], at)) for i in index_set])
        rhs.append(Fraction(0))

    zeta = solve_exact(rows, rhs)

    den = 1
    for z in zeta:
        den = den * z.denominator // gcd(den, z.denominator)
    weights = [int(z * den) for z in zeta]

    def coefficient(n_idx: int) -> Fraction:
        return Fraction(sum(w * sequences[i][n_idx] for w, i in zip(weights, index_set)), den)

    full = [coefficient(n_idx) for n_idx in range(N)]
    poly = ChebPoly.from_symmetric(full[:d + 1])
    tail = sum((2 * abs(c) for c in full[d + 1:]), Fraction(0))
    eta = {i: z * unroller.scale for i, z in zip(index_set, zeta)}
    return SolveOutput(
        poly=poly, N_used=N, retries=0, eta=eta, degree=d,
        singular=list(singular), tail_estimate=tail,
        full=full if keep_full else None,
    )


def approximate(ivp: IvpProblem, d: int, N: Optional[int] = None,
                max_retries: Optional[int] = None, workers: Optional[int] = None,
                keep_full: bool = False) -> SolveOutput:
    """Degree-d Chebyshev approximation of the solution of ``ivp``.

    ``N=None`` picks the start index from the Newton polygon. A singular
    selection system is retried with N increased by max(s, 1).
    """
    if d < 0:
        raise InputError(f"degree must be non-negative, got {d}")
    ensure_regular(ivp.op)
    max_retries = Config.max_retries() if max_retries is None else max_retries
    workers = Config.workers() if workers is None else workers

    P = chebyshev_recurrence(ivp.op)
    singular = singularities(P)
    minimum = max([d] + [n_idx + 1 for n_idx in singular])
    if N is None:
        N = choose_N_auto(P, d)
    if N < minimum:
        logger.warning(f"start index {N} below max(d, max S) + 1 = {minimum}; using {minimum}")
        N = minimum
    step = max(P.s, 1)
    logger.info(f"solving order-{ivp.op.order} problem: d = {d}, N = {N}, s = {P.s}, S = {singular}")

    start = N
    try:
        for attempt in Retrying(stop=stop_after_attempt(max_retries + 1),
                                retry=retry_if_exception_type(SingularSystemError),
                                reraise=True):
            with attempt:
                tries = attempt.retry_state.attempt_number - 1
                current = start + tries * step
                if tries:
                    logger.warning(f"singular selection system, retry {tries} with N = {current}")
                output = _solve_once(ivp, P, singular, d, current, workers, keep_full)
                output.retries = tries
    except SingularSystemError as e:
        logger.error(f"selection system singular for N = {start} .. {start + max_retries * step}")
        raise SingularSystemError(
            f"{e}; gave up after {max_retries} retries (last N = {start + max_retries * step})",
            start_index=start + max_retries * step,
        ) from e
    logger.info(f"approximation computed with N = {output.N_used} after {output.retries} retries")
    return output


def near_minimax_factor(d: int) -> float:
    """1 + Lebesgue constant bound of the degree-d Chebyshev projection."""
    return 4 / math.pi ** 2 * math.log(d + 1) + 5


def minimax_lower_estimate(full: Sequence[Fraction], d: int) -> Fraction:
    """max_{n > d} |c_n| (symmetric convention), a lower estimate of the best degree-d error.

    Exact coefficients satisfy |c_n| <= E_d for n > d; the computed ones are only
    approximations, so the value is not certified.
    """
    tail = [abs(c) for c in full[d + 1:]]
    return max(tail) if tail else Fraction(0)
