import random
from fractions import Fraction

import pytest

from cpsimplex.engine.linalg import (
    DimensionMismatchError,
    NotSymmetricError,
    SingularMatrixError,
    SymMatrix,
    bilinear,
    consecutive_ones,
    determinant,
    gram_an,
    hnf,
    int_matmul,
    jarre_matrix,
    linearly_independent,
    matrix_rank,
    quad_form,
    rank1,
    rational_inverse,
    solve_cone_coefficients,
    sym_inner,
    to_rational,
)


def test_to_rational_accepts_exact_inputs():
    assert to_rational(3) == Fraction(3)
    assert to_rational("-3/2") == Fraction(-3, 2)
    assert to_rational(" 25 ") == Fraction(25)
    assert to_rational("63.43") == Fraction(6343, 100)
    assert to_rational(Fraction(1, 7)) == Fraction(1, 7)


@pytest.mark.parametrize("value", [0.5, True, None, [1]])
def test_to_rational_rejects_inexact_types(value):
    with pytest.raises(TypeError):
        to_rational(value)


@pytest.mark.parametrize("value", ["1/0", "", "abc"])
def test_to_rational_rejects_bad_strings(value):
    with pytest.raises(ValueError):
        to_rational(value)


def test_symmatrix_checks_shape_and_symmetry():
    with pytest.raises(NotSymmetricError):
        SymMatrix.from_rows([[1, 2], [3, 4]])
    with pytest.raises(DimensionMismatchError):
        SymMatrix.from_rows([[1, 2], [2]])
    with pytest.raises(DimensionMismatchError):
        SymMatrix.from_rows([])


def test_upper_triangle_round_trip():
    matrix = SymMatrix.from_rows([["1", "2", "3"], ["2", "4", "5"], ["3", "5", "6"]])

    assert matrix.upper_triangle() == tuple(Fraction(x) for x in (1, 2, 3, 4, 5, 6))
    assert SymMatrix.from_upper_triangle(3, matrix.upper_triangle()) == matrix
    with pytest.raises(DimensionMismatchError):
        SymMatrix.from_upper_triangle(3, [1, 2, 3])


def test_arithmetic_and_inner_products():
    a = SymMatrix.from_rows([[1, 2], [2, 3]])
    b = SymMatrix.identity(2)

    assert (a + b)[0, 0] == 2
    assert (a - a).is_zero()
    assert (-a)[0, 1] == -2
    assert (a * "1/2")[1, 1] == Fraction(3, 2)
    assert sym_inner(a, b) == 4
    assert sym_inner(a, rank1((1, 2))) == quad_form(a, (1, 2)) == 1 + 8 + 12
    assert bilinear(a, (1, 0), (0, 1)) == 2
    with pytest.raises(DimensionMismatchError):
        sym_inner(a, SymMatrix.identity(3))
    with pytest.raises(DimensionMismatchError):
        quad_form(a, (1, 2, 3))


def test_primitive_scales_to_coprime_integers():
    matrix = SymMatrix.from_rows([["1/2", "-3/4"], ["-3/4", "3/2"]])

    assert matrix.primitive() == SymMatrix.from_rows([[2, -3], [-3, 6]])
    assert matrix.primitive().is_integral()


def test_gram_an_and_jarre_matrix():
    assert gram_an(3).as_lists() == [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    assert jarre_matrix(2, 1).as_lists() == [[2, 1, 1], [1, 1, 0], [1, 0, 1]]
    assert jarre_matrix(1, 2).as_lists() == [[1, 0, 1], [0, 1, 1], [1, 1, 2]]
    with pytest.raises(ValueError):
        gram_an(0)


def test_gram_an_is_a_sum_of_squares():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(1, 6)
        x = [rng.randint(-9, 9) for _ in range(n)]
        expected = x[0] ** 2 + sum((x[i] - x[i + 1]) ** 2 for i in range(n - 1)) + x[-1] ** 2

        assert quad_form(gram_an(n), x) == expected, x


def test_quad_form_agrees_with_inner_product_against_rank1():
    rng = random.Random(12)
    for _ in range(100):
        n = rng.randint(1, 5)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
        b = SymMatrix.from_rows(rows)
        v = [rng.randint(-5, 5) for _ in range(n)]

        assert quad_form(b, v) == sym_inner(b, rank1(v))
        assert bilinear(b, v, v) == quad_form(b, v)


def test_consecutive_ones():
    assert consecutive_ones(1) == ((1,),)
    assert consecutive_ones(2) == ((0, 1), (1, 0), (1, 1))
    assert len(consecutive_ones(5)) == 15
    assert all(quad_form(gram_an(4), v) == 2 for v in consecutive_ones(4))


def test_rank_and_independence():
    assert matrix_rank([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2
    assert linearly_independent([rank1((1, 0)), rank1((0, 1)), rank1((1, 1))])
    assert not linearly_independent([rank1((1, 0)), rank1((0, 1)), rank1((1, 0)) + rank1((0, 1))])


def test_solve_cone_coefficients():
    generators = [rank1((1, 0)), rank1((0, 1)), rank1((1, 1))]

    assert solve_cone_coefficients(generators, rank1((2, 1))) == [2, -1, 2]
    assert solve_cone_coefficients(generators[:2], rank1((1, 1))) is None
    assert solve_cone_coefficients([], SymMatrix.zeros(2)) == []


def test_determinant_and_inverses():
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([[1, 2], [2, 4]]) == 0
    assert rational_inverse([[2, 0], [0, 4]]) == [[Fraction(1, 2), 0], [0, Fraction(1, 4)]]
    with pytest.raises(SingularMatrixError):
        rational_inverse([[1, 2], [2, 4]])


@pytest.mark.parametrize(
    "matrix",
    [
        [[2, 1], [1, 1]],
        [[1, 1, 0], [0, 1, 1], [0, 0, 2]],
        [[3, 1, 2], [1, 2, 1], [0, 1, 1]],
        [[0, 2], [3, 0]],
        [[1, 1, 1], [0, 1, 2], [0, 0, 1]],
    ],
)
def test_hnf_is_upper_triangular_and_reduced(matrix):
    u, w = hnf(matrix)

    assert int_matmul(u, matrix) == w
    assert abs(determinant(u)) == 1
    n = len(matrix)
    for i in range(n):
        assert w[i][i] > 0
        for j in range(i):
            assert w[i][j] == 0
        for r in range(i):
            assert 0 <= w[r][i] < w[i][i]


def test_hnf_of_unimodular_matrix_is_identity():
    _, w = hnf([[2, 1], [1, 1]])

    assert w == [[1, 0], [0, 1]]


def test_hnf_rejects_singular_matrix():
    with pytest.raises(SingularMatrixError):
        hnf([[1, 2], [2, 4]])
