"""Exact rational linear programming.

A two-phase tableau simplex over :class:`fractions.Fraction`. Callers describe
an LP naturally (row senses, per-variable bounds, min or max); the solver
converts it to equality standard form internally and maps every certificate
back to the caller's variables and rows:

* ``OPTIMAL``: a basic optimal solution plus the dual vector on the rows.
* ``INFEASIBLE``: a Farkas vector ``y`` on the rows; see :func:`farkas_holds`.
* ``UNBOUNDED``: a recession ray that strictly improves the objective.

Artificial columns stay in the tableau for the whole solve. Their block is
``B^-1``, which gives the duals and drives the lexicographic ratio test.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from cpsimplex.engine.linalg import to_rational
from cpsimplex.logs import get_logger

_LOGGER = get_logger("lp")


class MalformedProgramError(ValueError):
    """Raised when a linear program is not well formed."""


class Sense(str, enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class Direction(str, enum.Enum):
    MIN = "min"
    MAX = "max"


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class PivotingRule(str, enum.Enum):
    BLAND = "bland"
    LEXICOGRAPHIC = "lexicographic"


Bound = tuple[Fraction | None, Fraction | None]


def _optional_rational(value: Any) -> Fraction | None:
    return None if value is None else to_rational(value)


@dataclass(frozen=True)
class LinearProgram:
    """``min/max c.x`` subject to ``rows[i].x (sense_i) rhs[i]`` and ``lo <= x <= hi``.

    ``None`` in a bound means unbounded on that side. Build instances with
    :meth:`build`, which converts scalars and defaults every variable to
    ``x >= 0``.
    """

    objective: tuple[Fraction, ...]
    rows: tuple[tuple[Fraction, ...], ...]
    senses: tuple[Sense, ...]
    rhs: tuple[Fraction, ...]
    bounds: tuple[Bound, ...]
    direction: Direction = Direction.MIN

    def __post_init__(self) -> None:
        nvars = len(self.objective)
        if len(self.senses) != len(self.rows) or len(self.rhs) != len(self.rows):
            raise MalformedProgramError("rows, senses and rhs must have the same length")
        for index, row in enumerate(self.rows):
            if len(row) != nvars:
                raise MalformedProgramError(f"Row {index} has {len(row)} coefficients, expected {nvars}")
        if len(self.bounds) != nvars:
            raise MalformedProgramError(f"Expected {nvars} bounds, got {len(self.bounds)}")
        for index, (lo, hi) in enumerate(self.bounds):
            if lo is not None and hi is not None and lo > hi:
                raise MalformedProgramError(f"Variable {index} has lower bound {lo} above upper bound {hi}")

    @classmethod
    def build(
        cls,
        objective: Sequence[Any],
        rows: Sequence[Sequence[Any]],
        senses: Sequence[str | Sense],
        rhs: Sequence[Any],
        bounds: Sequence[tuple[Any, Any]] | None = None,
        direction: str | Direction = Direction.MIN,
    ) -> LinearProgram:
        try:
            parsed_senses = tuple(Sense(sense) for sense in senses)
            parsed_direction = Direction(direction)
        except ValueError as exc:
            raise MalformedProgramError(str(exc)) from exc
        nvars = len(objective)
        if bounds is None:
            parsed_bounds: tuple[Bound, ...] = tuple((Fraction(0), None) for _ in range(nvars))
        else:
            parsed_bounds = tuple((_optional_rational(lo), _optional_rational(hi)) for lo, hi in bounds)
        return cls(
            objective=tuple(to_rational(c) for c in objective),
            rows=tuple(tuple(to_rational(a) for a in row) for row in rows),
            senses=parsed_senses,
            rhs=tuple(to_rational(b) for b in rhs),
            bounds=parsed_bounds,
            direction=parsed_direction,
        )

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    solution: tuple[Fraction, ...] = ()
    objective_value: Fraction | None = None
    basis: tuple[int, ...] = ()
    duals: tuple[Fraction, ...] = ()
    farkas: tuple[Fraction, ...] = ()
    ray: tuple[Fraction, ...] = ()

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Dense simplex tableau; the last ``m`` columns are the artificials."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], num_real: int) -> None:
        self.rows = rows
        self.rhs = rhs
        self.num_real = num_real
        self.basis = [num_real + r for r in range(len(rows))]
        self.cost: list[Fraction] = []
        self.pivots = 0

    def set_costs(self, costs: Sequence[Fraction]) -> None:
        """Install reduced costs for the column cost vector ``costs``."""

        reduced = list(costs)
        for row, basic in zip(self.rows, self.basis):
            weight = costs[basic]
            if weight:
                reduced = [r - weight * a for r, a in zip(reduced, row)]
        self.cost = reduced

    def pivot(self, r: int, e: int) -> None:
        lead = self.rows[r][e]
        pivot_row = [a / lead for a in self.rows[r]]
        self.rows[r] = pivot_row
        self.rhs[r] = self.rhs[r] / lead
        for i, row in enumerate(self.rows):
            factor = row[e]
            if i != r and factor:
                self.rows[i] = [a - factor * b if b else a for a, b in zip(row, pivot_row)]
                self.rhs[i] -= factor * self.rhs[r]
        factor = self.cost[e]
        if factor:
            self.cost = [a - factor * b if b else a for a, b in zip(self.cost, pivot_row)]
        self.basis[r] = e
        self.pivots += 1

    def _entering(self, rule: PivotingRule) -> int | None:
        candidates = [j for j in range(self.num_real) if self.cost[j] < 0]
        if not candidates:
            return None
        if rule is PivotingRule.BLAND:
            return candidates[0]
        return min(candidates, key=lambda j: (self.cost[j], j))

    def _leaving(self, e: int, rule: PivotingRule) -> int | None:
        rows = [r for r in range(len(self.rows)) if self.rows[r][e] > 0]
        if not rows:
            return None
        if rule is PivotingRule.BLAND:
            return min(rows, key=lambda r: (self.rhs[r] / self.rows[r][e], self.basis[r]))

        def lex_key(r: int) -> tuple[Fraction, ...]:
            t = self.rows[r][e]
            return (self.rhs[r] / t, *(a / t for a in self.rows[r][self.num_real :]))

        return min(rows, key=lex_key)

    def run(self, rule: PivotingRule) -> int | None:
        """Pivot to optimality; returns the unbounded entering column or ``None``."""

        while True:
            e = self._entering(rule)
            if e is None:
                return None
            r = self._leaving(e, rule)
            if r is None:
                return e
            self.pivot(r, e)

    def values(self) -> list[Fraction]:
        z = [Fraction(0)] * (self.num_real + len(self.rows))
        for value, basic in zip(self.rhs, self.basis):
            z[basic] = value
        return z

    def artificial_duals(self, costs: Sequence[Fraction]) -> list[Fraction]:
        # y' = c_B B^-1 = c_art - reduced cost of the artificial columns
        return [costs[self.num_real + r] - self.cost[self.num_real + r] for r in range(len(self.rows))]


@dataclass
class _StandardForm:
    lp: LinearProgram
    kept_rows: list[int]
    flips: list[int]
    offsets: list[Fraction]
    terms: list[list[tuple[int, int]]]
    num_structural: int
    tableau: _Tableau

    def to_original(self, z: Sequence[Fraction], *, with_offset: bool = True) -> tuple[Fraction, ...]:
        values = []
        for offset, term in zip(self.offsets, self.terms):
            value = offset if with_offset else Fraction(0)
            for col, sign in term:
                value += sign * z[col]
            values.append(value)
        return tuple(values)

    def row_vector(self, standard: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Map per-standard-row multipliers back onto the original rows."""

        out = [Fraction(0)] * self.lp.num_rows
        for r, original in enumerate(self.kept_rows):
            out[original] = self.flips[r] * standard[r]
        return tuple(out)


def _standardize(lp: LinearProgram, kept_rows: list[int]) -> _StandardForm:
    offsets: list[Fraction] = []
    terms: list[list[tuple[int, int]]] = []
    bound_rows: list[tuple[int, Fraction]] = []
    ncols = 0
    for lo, hi in lp.bounds:
        if lo is not None:
            offsets.append(lo)
            terms.append([(ncols, 1)])
            if hi is not None:
                bound_rows.append((ncols, hi - lo))
            ncols += 1
        elif hi is not None:
            offsets.append(hi)
            terms.append([(ncols, -1)])
            ncols += 1
        else:
            offsets.append(Fraction(0))
            terms.append([(ncols, 1), (ncols + 1, -1)])
            ncols += 2

    coefficient_rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    senses: list[Sense] = []
    for i in kept_rows:
        row = [Fraction(0)] * ncols
        shift = Fraction(0)
        for a, offset, term in zip(lp.rows[i], offsets, terms):
            if a:
                shift += a * offset
                for col, sign in term:
                    row[col] += sign * a
        coefficient_rows.append(row)
        rhs.append(lp.rhs[i] - shift)
        senses.append(lp.senses[i])
    for col, limit in bound_rows:
        row = [Fraction(0)] * ncols
        row[col] = Fraction(1)
        coefficient_rows.append(row)
        rhs.append(limit)
        senses.append(Sense.LE)

    m = len(coefficient_rows)
    slack_rows = [r for r in range(m) if senses[r] is not Sense.EQ]
    num_real = ncols + len(slack_rows)
    flips: list[int] = []
    rows: list[list[Fraction]] = []
    for r in range(m):
        full = coefficient_rows[r] + [Fraction(0)] * (num_real - ncols) + [Fraction(0)] * m
        if senses[r] is not Sense.EQ:
            full[ncols + slack_rows.index(r)] = Fraction(1 if senses[r] is Sense.LE else -1)
        flip = -1 if rhs[r] < 0 else 1
        if flip < 0:
            full = [-a for a in full]
            rhs[r] = -rhs[r]
        full[num_real + r] = Fraction(1)
        flips.append(flip)
        rows.append(full)

    return _StandardForm(
        lp=lp,
        kept_rows=kept_rows,
        flips=flips,
        offsets=offsets,
        terms=terms,
        num_structural=ncols,
        tableau=_Tableau(rows, rhs, num_real),
    )


def _presolve(lp: LinearProgram) -> tuple[list[int], LpOutcome | None]:
    """Drop identically zero rows; an unsatisfiable one is a Farkas certificate."""

    kept: list[int] = []
    for i, (row, sense, b) in enumerate(zip(lp.rows, lp.senses, lp.rhs)):
        if any(row):
            kept.append(i)
            continue
        violated = (
            (sense is Sense.LE and b < 0) or (sense is Sense.GE and b > 0) or (sense is Sense.EQ and b != 0)
        )
        if violated:
            farkas = [Fraction(0)] * lp.num_rows
            farkas[i] = Fraction(1 if b > 0 else -1)
            return kept, LpOutcome(LpStatus.INFEASIBLE, farkas=tuple(farkas))
    return kept, None


def _drive_out_artificials(tableau: _Tableau) -> None:
    for r in range(len(tableau.rows)):
        if tableau.basis[r] < tableau.num_real:
            continue
        col = next((j for j in range(tableau.num_real) if tableau.rows[r][j] != 0), None)
        # a row without real support is redundant and keeps its artificial at zero
        if col is not None:
            tableau.pivot(r, col)


def solve(lp: LinearProgram, rule: PivotingRule = PivotingRule.BLAND) -> LpOutcome:
    """Solve ``lp`` exactly.

    Deterministic for a fixed ``rule``. Bland's rule is the default; the
    lexicographic rule pairs Dantzig's entering choice with a lexicographic
    ratio test.
    """

    kept, early = _presolve(lp)
    if early is not None:
        _LOGGER.debug("LP infeasible in presolve")
        return early

    form = _standardize(lp, kept)
    tableau = form.tableau
    m = len(tableau.rows)
    width = tableau.num_real + m

    phase_one = [Fraction(0)] * tableau.num_real + [Fraction(1)] * m
    tableau.set_costs(phase_one)
    tableau.run(rule)
    infeasibility = sum(
        (value for value, basic in zip(tableau.rhs, tableau.basis) if basic >= tableau.num_real), Fraction(0)
    )
    if infeasibility > 0:
        _LOGGER.debug("LP infeasible after phase one (%d pivots)", tableau.pivots)
        return LpOutcome(LpStatus.INFEASIBLE, farkas=form.row_vector(tableau.artificial_duals(phase_one)))

    _drive_out_artificials(tableau)

    sign = 1 if lp.direction is Direction.MIN else -1
    phase_two = [Fraction(0)] * width
    for c, term in zip(lp.objective, form.terms):
        for col, term_sign in term:
            phase_two[col] = sign * term_sign * c
    tableau.set_costs(phase_two)
    unbounded_column = tableau.run(rule)

    if unbounded_column is not None:
        direction = [Fraction(0)] * width
        direction[unbounded_column] = Fraction(1)
        for row, basic in zip(tableau.rows, tableau.basis):
            direction[basic] = -row[unbounded_column]
        _LOGGER.debug("LP unbounded after %d pivots", tableau.pivots)
        return LpOutcome(LpStatus.UNBOUNDED, ray=form.to_original(direction, with_offset=False))

    solution = form.to_original(tableau.values())
    value = sum((c * x for c, x in zip(lp.objective, solution)), Fraction(0))
    duals = [sign * y for y in tableau.artificial_duals(phase_two)]
    basic_columns = set(tableau.basis)
    basis = sorted({var for var, term in enumerate(form.terms) for col, _ in term if col in basic_columns})
    _LOGGER.debug("LP optimal after %d pivots, value %s", tableau.pivots, value)
    return LpOutcome(
        LpStatus.OPTIMAL,
        solution=solution,
        objective_value=value,
        basis=tuple(basis),
        duals=form.row_vector(duals),
    )


def feasible_point(
    rows: Sequence[Sequence[Any]],
    senses: Sequence[str | Sense],
    rhs: Sequence[Any],
    *,
    bounds: Sequence[tuple[Any, Any]] | None = None,
    num_vars: int | None = None,
    rule: PivotingRule = PivotingRule.BLAND,
) -> LpOutcome:
    """Phase-one driver: a basic feasible point or a Farkas certificate."""

    if num_vars is None:
        num_vars = len(rows[0]) if rows else len(bounds) if bounds is not None else 0
    lp = LinearProgram.build([0] * num_vars, rows, senses, rhs, bounds=bounds)
    return solve(lp, rule)


def is_feasible_solution(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    if len(x) != lp.num_vars:
        return False
    for value, (lo, hi) in zip(x, lp.bounds):
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            return False
    for row, sense, b in zip(lp.rows, lp.senses, lp.rhs):
        lhs = sum((a * v for a, v in zip(row, x)), Fraction(0))
        if (sense is Sense.LE and lhs > b) or (sense is Sense.GE and lhs < b) or (sense is Sense.EQ and lhs != b):
            return False
    return True


def farkas_holds(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    """Check that ``y`` proves ``lp`` infeasible.

    Sign conditions make ``(A^T y).x >= y.b`` valid for every feasible ``x``:
    ``y_i <= 0`` on ``<=`` rows and ``y_i >= 0`` on ``>=`` rows. The
    certificate holds when the supremum of ``(A^T y).x`` over the bound box is
    finite and strictly below ``y.b``.
    """

    if len(y) != lp.num_rows:
        return False
    for multiplier, sense in zip(y, lp.senses):
        if (sense is Sense.LE and multiplier > 0) or (sense is Sense.GE and multiplier < 0):
            return False
    supremum = Fraction(0)
    for j, (lo, hi) in enumerate(lp.bounds):
        d = sum((row[j] * multiplier for row, multiplier in zip(lp.rows, y)), Fraction(0))
        if d > 0:
            if hi is None:
                return False
            supremum += d * hi
        elif d < 0:
            if lo is None:
                return False
            supremum += d * lo
    return supremum < sum((multiplier * b for multiplier, b in zip(y, lp.rhs)), Fraction(0))
