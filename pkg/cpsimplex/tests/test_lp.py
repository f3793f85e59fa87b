from fractions import Fraction

import pytest

from cpsimplex.engine.lp import (
    LinearProgram,
    LpStatus,
    MalformedProgramError,
    PivotingRule,
    farkas_holds,
    feasible_point,
    is_feasible_solution,
    solve,
)


def test_maximization_with_duals():
    lp = LinearProgram.build(
        objective=[1, 1],
        rows=[[1, 2], [3, 1]],
        senses=["<=", "<="],
        rhs=[4, 6],
        direction="max",
    )

    outcome = solve(lp)

    assert outcome.status is LpStatus.OPTIMAL
    assert outcome.solution == (Fraction(8, 5), Fraction(6, 5))
    assert outcome.objective_value == Fraction(14, 5)
    assert outcome.duals == (Fraction(2, 5), Fraction(1, 5))
    assert outcome.basis == (0, 1)
    assert is_feasible_solution(lp, outcome.solution)


@pytest.mark.parametrize("rule", list(PivotingRule))
def test_degenerate_program_terminates(rule):
    # Beale's example cycles under Dantzig's rule with the textbook ratio test
    lp = LinearProgram.build(
        objective=["-3/4", 20, "-1/2", 6],
        rows=[["1/4", -8, -1, 9], ["1/2", -12, "-1/2", 3], [0, 0, 1, 0]],
        senses=["<=", "<=", "<="],
        rhs=[0, 0, 1],
    )

    outcome = solve(lp, rule)

    assert outcome.status is LpStatus.OPTIMAL
    assert outcome.objective_value == Fraction(-5, 4)


def test_free_and_upper_bounded_variables():
    lp = LinearProgram.build(
        objective=[1, 0],
        rows=[[1, 1]],
        senses=["="],
        rhs=[2],
        bounds=[(None, None), (None, 5)],
    )

    outcome = solve(lp)

    assert outcome.status is LpStatus.OPTIMAL
    assert outcome.solution == (Fraction(-3), Fraction(5))
    assert outcome.objective_value == -3


def test_boxed_variable_with_lower_bound():
    lp = LinearProgram.build(objective=[1], rows=[[1]], senses=[">="], rhs=[-10], bounds=[(-2, 3)])

    outcome = solve(lp)

    assert outcome.solution == (Fraction(-2),)


def test_infeasible_program_has_farkas_certificate():
    lp = LinearProgram.build(objective=[0, 0], rows=[[1, 1], [1, 1]], senses=["<=", ">="], rhs=[1, 3])

    outcome = solve(lp)

    assert outcome.status is LpStatus.INFEASIBLE
    assert farkas_holds(lp, outcome.farkas)


def test_infeasible_box_is_detected():
    lp = LinearProgram.build(objective=[0], rows=[[1]], senses=[">="], rhs=[5], bounds=[(0, 2)])

    outcome = solve(lp)

    assert outcome.status is LpStatus.INFEASIBLE
    assert farkas_holds(lp, outcome.farkas)


def test_zero_row_is_caught_in_presolve():
    lp = LinearProgram.build(objective=[1, 1], rows=[[0, 0]], senses=["="], rhs=[1])

    outcome = solve(lp)

    assert outcome.status is LpStatus.INFEASIBLE
    assert outcome.farkas == (Fraction(1),)
    assert farkas_holds(lp, outcome.farkas)


def test_farkas_holds_rejects_wrong_vectors():
    lp = LinearProgram.build(objective=[0, 0], rows=[[1, 1], [1, 1]], senses=["<=", ">="], rhs=[1, 3])

    assert not farkas_holds(lp, (Fraction(1), Fraction(-1)))
    assert not farkas_holds(lp, (Fraction(0), Fraction(0)))
    assert not farkas_holds(lp, (Fraction(-1),))


def test_unbounded_program_returns_improving_ray():
    lp = LinearProgram.build(objective=[1, 0], rows=[[1, -1]], senses=["<="], rhs=[1], direction="max")

    outcome = solve(lp)

    assert outcome.status is LpStatus.UNBOUNDED
    dx, dy = outcome.ray
    assert dx > 0
    assert dx - dy <= 0
    assert dy >= 0


def test_feasible_point_returns_basic_solution():
    outcome = feasible_point([[1, 1, 1], [1, 2, 3]], ["=", "="], [3, 6])

    assert outcome.is_optimal
    assert sum(outcome.solution) == 3
    assert outcome.solution[0] + 2 * outcome.solution[1] + 3 * outcome.solution[2] == 6
    assert sum(1 for x in outcome.solution if x != 0) <= 2


def test_malformed_programs_are_rejected():
    with pytest.raises(MalformedProgramError):
        LinearProgram.build(objective=[1, 1], rows=[[1]], senses=["<="], rhs=[1])
    with pytest.raises(MalformedProgramError):
        LinearProgram.build(objective=[1], rows=[[1]], senses=["<"], rhs=[1])
    with pytest.raises(MalformedProgramError):
        LinearProgram.build(objective=[1], rows=[[1]], senses=["<="], rhs=[1], bounds=[(2, 1)])
    with pytest.raises(TypeError):
        LinearProgram.build(objective=[0.5], rows=[[1]], senses=["<="], rhs=[1])
