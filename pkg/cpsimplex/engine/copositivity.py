"""Exact copositivity tests.

A symmetric ``B`` is copositive iff every principal submatrix of size ``n-1``
is copositive and the value of the matrix game with payoff ``B`` is
nonnegative; it is strictly copositive when the same holds with strict
inequalities. Unrolled, the recursion asks each principal submatrix, smallest
first, for its game value exactly once.
"""

from __future__ import annotations

import operator
from fractions import Fraction
from itertools import combinations
from typing import Callable

from cpsimplex.engine.linalg import SymMatrix
from cpsimplex.engine.lp import LinearProgram, LpStatus, solve


def game_value(b: SymMatrix) -> Fraction:
    """``max { l : y in simplex, B y >= l e }``, solved exactly."""

    n = b.n
    # variables y_1..y_n >= 0 and a free l
    rows = [list(b.rows[i]) + [Fraction(-1)] for i in range(n)]
    rows.append([Fraction(1)] * n + [Fraction(0)])
    lp = LinearProgram.build(
        objective=[0] * n + [1],
        rows=rows,
        senses=[">="] * n + ["="],
        rhs=[0] * n + [1],
        bounds=[(0, None)] * n + [(None, None)],
        direction="max",
    )
    outcome = solve(lp)
    if outcome.status is not LpStatus.OPTIMAL or outcome.objective_value is None:
        raise RuntimeError(f"Game value LP ended with status {outcome.status.value}")
    return outcome.objective_value


def first_failure(b: SymMatrix, *, strict: bool = False) -> tuple[int, ...] | None:
    """Smallest principal index set whose test fails, or ``None`` if ``B`` passes."""

    passes: Callable[[Fraction, int], bool] = operator.gt if strict else operator.ge  # type: ignore[assignment]
    for size in range(1, b.n + 1):
        for indices in combinations(range(b.n), size):
            if size == 1:
                value = b[indices[0], indices[0]]
            else:
                value = game_value(b.principal(indices))
            if not passes(value, 0):
                return indices
    return None


def is_copositive(b: SymMatrix) -> bool:
    return first_failure(b, strict=False) is None


def is_strictly_copositive(b: SymMatrix) -> bool:
    return first_failure(b, strict=True) is None
