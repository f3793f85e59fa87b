from fractions import Fraction

import pytest

from cpsimplex.engine.cones import (
    Factorization,
    InconsistentStateError,
    NotPerfectError,
    caratheodory_reduce,
    dual_extreme_rays,
    make_vertex,
    membership,
    vertex_from_minimum,
)
from cpsimplex.engine.copositive_min import NotStrictlyCopositiveError
from cpsimplex.engine.linalg import (
    DimensionMismatchError,
    SymMatrix,
    gram_an,
    linearly_independent,
    quad_form,
    rank1,
    sym_inner,
    symmetric_dimension,
)

A2_RAYS = {
    SymMatrix.from_rows([[0, 1], [1, 0]]),
    SymMatrix.from_rows([[2, -1], [-1, 0]]),
    SymMatrix.from_rows([[0, -1], [-1, 2]]),
}


def test_a2_vertex():
    vertex = make_vertex(gram_an(2))

    assert vertex.matrix == SymMatrix.from_rows([["1", "-1/2"], ["-1/2", "1"]])
    assert vertex.min_vectors == ((0, 1), (1, 0), (1, 1))
    assert set(vertex.dual_rays) == A2_RAYS


def test_dual_extreme_rays_of_half_a2():
    vertex = make_vertex(gram_an(2))
    rays = dual_extreme_rays(vertex)

    assert len(rays) == 3
    assert set(rays) == A2_RAYS
    for ray in rays:
        values = [quad_form(ray, v) for v in vertex.min_vectors]
        assert all(value >= 0 for value in values)
        assert values.count(0) == 2


@pytest.mark.parametrize("n", [3, 4])
def test_dual_rays_are_extreme(n):
    vertex = make_vertex(gram_an(n))
    d = symmetric_dimension(n)

    assert len(vertex.min_vectors) == d
    assert len(vertex.dual_rays) >= d
    for ray in vertex.dual_rays:
        values = [quad_form(ray, v) for v in vertex.min_vectors]
        assert all(value >= 0 for value in values)
        tight = [rank1(v) for v, value in zip(vertex.min_vectors, values) if value == 0]
        assert len(tight) >= d - 1
        assert ray.is_integral()


def test_make_vertex_requires_strict_copositivity():
    with pytest.raises(NotStrictlyCopositiveError):
        make_vertex(SymMatrix.from_rows([[1, -1], [-1, 1]]))


def test_vertex_from_minimum_checks_its_input():
    p = make_vertex(gram_an(2)).matrix

    with pytest.raises(NotPerfectError):
        vertex_from_minimum(p, [(1, 0), (0, 1)])
    with pytest.raises(InconsistentStateError):
        vertex_from_minimum(p, [(1, 0), (0, 1), (2, 1)])
    with pytest.raises(NotPerfectError):
        vertex_from_minimum(p, [])


def test_membership_inside_voronoi_cone():
    vertex = make_vertex(gram_an(2))
    a = rank1((1, 1)).scale(3) + rank1((1, 0))

    result = membership(a, vertex)

    assert result.is_member
    assert result.factorization == Factorization.from_terms([(1, (1, 0)), (3, (1, 1))])
    assert result.violations == ()


def test_membership_reports_violated_rays():
    vertex = make_vertex(gram_an(2))

    result = membership(rank1((2, 1)), vertex)

    assert not result.is_member
    assert result.violations == (SymMatrix.from_rows([[0, -1], [-1, 2]]),)
    assert all(sym_inner(rank1((2, 1)), ray) < 0 for ray in result.violations)


def test_membership_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        membership(SymMatrix.identity(3), make_vertex(gram_an(2)))


def test_factorization_helpers():
    f = Factorization.from_terms([(2, (1, 1)), ("1/2", (0, 1))])

    assert len(f) == 2
    assert f.matrix(2) == SymMatrix.from_rows([[2, 2], [2, "5/2"]])
    assert f.is_nonnegative()
    assert f.sorted().terms[0] == (Fraction(1, 2), (0, 1))
    assert not Factorization.from_terms([(-1, (1, 0))]).is_nonnegative()
    assert not Factorization.from_terms([(1, (1, -1))]).is_nonnegative()
    with pytest.raises(DimensionMismatchError):
        f.matrix(3)


def test_caratheodory_reduce_merges_and_drops_dependent_terms():
    f = Factorization.from_terms([(1, (1, 0)), (1, (0, 1)), (1, (1, 1)), (1, (1, 2)), (2, (1, 1)), (0, (3, 1))])

    reduced = caratheodory_reduce(f)

    assert reduced.matrix(2) == f.matrix(2)
    assert len(reduced) <= 3
    assert all(alpha > 0 for alpha, _ in reduced.terms)
    assert linearly_independent([rank1(v) for _, v in reduced.terms])


def test_caratheodory_reduce_of_empty_factorization():
    assert caratheodory_reduce(Factorization(())) == Factorization(())
