# src/utils/linalg.py
"""Exact solution of small dense linear systems over the rationals."""
import logging
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Union

from src.utils.exceptions import SingularSystemError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


def _integer_row(row: Sequence[Number]) -> List[int]:
    """Scale a rational row by the lcm of its denominators."""
    den = 1
    for v in row:
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    return [int(v * den) for v in row]


def solve_exact(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> List[Fraction]:
    """Unique solution of matrix @ x = rhs by fraction-free (Bareiss) elimination.

    The matrix may have more rows than columns; zero rows are fine as long as the
    system stays consistent. Rank deficiency or inconsistency raises SingularSystemError.
    """
    if len(matrix) != len(rhs):
        raise ValueError("matrix and right-hand side have different lengths")
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = [_integer_row(list(row) + [b]) for row, b in zip(matrix, rhs)]
    nrows = len(rows)

    prev = 1
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, nrows) if rows[i][col] != 0), None)
        if pivot is None:
            raise SingularSystemError(f"linear system is rank deficient at column {col} of {ncols}")
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        head = rows[rank]
        p = head[col]
        for i in range(rank + 1, nrows):
            row = rows[i]
            factor = row[col]
            for j in range(col + 1, ncols + 1):
                row[j] = (p * row[j] - factor * head[j]) // prev
            row[col] = 0
        prev = p
        rank += 1

    for i in range(rank, nrows):
        if rows[i][ncols] != 0:
            raise SingularSystemError("linear system is inconsistent")

    solution = [Fraction(0)] * ncols
    for i in range(ncols - 1, -1, -1):
        acc = Fraction(rows[i][ncols])
        for j in range(i + 1, ncols):
            acc -= rows[i][j] * solution[j]
        solution[i] = acc / rows[i][i]
    return solution
