"""Vertices of the Ryshkov-type polyhedron and their Voronoi cones.

A vertex ``P`` (scaled to ``minC(P) = 1``) is determined by its minimal
vectors. Its Voronoi cone is generated by ``v v^T`` for ``v`` in ``MinC(P)``;
the pivot candidates of the walk are the extreme rays of the dual cone
``{Q : <Q, v v^T> >= 0 for all v in MinC(P)}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from cpsimplex.engine.copositive_min import NotStrictlyCopositiveError, copositive_minimum
from cpsimplex.engine.copositivity import is_strictly_copositive
from cpsimplex.engine.linalg import (
    DimensionMismatchError,
    LatticeVector,
    SymMatrix,
    matrix_rank,
    quad_form,
    rank1,
    rational_inverse,
    sym_inner,
    symmetric_dimension,
)
from cpsimplex.engine.lp import LpStatus, feasible_point
from cpsimplex.logs import get_logger
from cpsimplex.settings import Settings, get_settings

_LOGGER = get_logger("cones")


class NotPerfectError(ValueError):
    """Raised when the minimal vectors do not determine the matrix."""


class RayLimitError(RuntimeError):
    """Raised when the double description exceeds the configured ray count."""


class InconsistentStateError(RuntimeError):
    """Raised when an exact certificate that must exist cannot be produced."""


@dataclass(frozen=True)
class Factorization:
    """Terms ``(alpha, v)`` of ``sum alpha v v^T``."""

    terms: tuple[tuple[Fraction, LatticeVector], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Fraction | int, Sequence[int]]]) -> Factorization:
        return cls(tuple((Fraction(alpha), tuple(int(x) for x in v)) for alpha, v in terms))

    def __len__(self) -> int:
        return len(self.terms)

    def matrix(self, n: int) -> SymMatrix:
        total = SymMatrix.zeros(n)
        for alpha, v in self.terms:
            if len(v) != n:
                raise DimensionMismatchError(f"Term vector {v} does not have length {n}")
            total = total + rank1(v).scale(alpha)
        return total

    def is_nonnegative(self) -> bool:
        return all(alpha >= 0 and all(x >= 0 for x in v) for alpha, v in self.terms)

    def sorted(self) -> Factorization:
        return Factorization(tuple(sorted(self.terms, key=lambda term: (term[1], term[0]))))


@dataclass(frozen=True)
class PerfectVertex:
    matrix: SymMatrix
    min_vectors: tuple[LatticeVector, ...]
    dual_rays: tuple[SymMatrix, ...]

    @property
    def n(self) -> int:
        return self.matrix.n


@dataclass(frozen=True)
class MembershipResult:
    """Either coefficients over ``MinC(P)`` or the dual rays ``A`` violates."""

    coefficients: tuple[Fraction, ...] | None
    factorization: Factorization | None
    violations: tuple[SymMatrix, ...]

    @property
    def is_member(self) -> bool:
        return self.factorization is not None


def _inequality(v: LatticeVector) -> tuple[int, ...]:
    # <Q, v v^T> in upper-triangle coordinates of Q
    n = len(v)
    return tuple(v[i] * v[j] * (1 if i == j else 2) for i in range(n) for j in range(i, n))


def _primitive(vector: Sequence[Fraction | int]) -> tuple[int, ...]:
    fractions = [Fraction(x) for x in vector]
    denominator = math.lcm(*(x.denominator for x in fractions))
    integers = [int(x * denominator) for x in fractions]
    content = math.gcd(*integers)
    return tuple(x // content for x in integers)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


@lru_cache(maxsize=512)
def _dual_ray_vectors(vectors: tuple[LatticeVector, ...], ray_limit: int) -> tuple[tuple[int, ...], ...]:
    """Double description of ``{q : h_v . q >= 0}``, inequalities by increasing norm."""

    order = sorted(vectors, key=lambda v: (sum(x * x for x in v), v))
    inequalities = [_inequality(v) for v in order]
    d = len(inequalities[0])

    chosen: list[int] = []
    for index, h in enumerate(inequalities):
        if matrix_rank([inequalities[k] for k in chosen] + [h]) == len(chosen) + 1:
            chosen.append(index)
            if len(chosen) == d:
                break
    if len(chosen) < d:
        raise NotPerfectError("Inequalities do not span the space of symmetric matrices")

    inverse = rational_inverse([inequalities[k] for k in chosen])
    all_chosen = sum(1 << k for k in chosen)
    rays: list[tuple[int, ...]] = []
    masks: list[int] = []
    for position, k in enumerate(chosen):
        rays.append(_primitive([inverse[row][position] for row in range(d)]))
        masks.append(all_chosen & ~(1 << k))

    chosen_set = set(chosen)
    for index, h in enumerate(inequalities):
        if index in chosen_set:
            continue
        bit = 1 << index
        values = [_dot(h, ray) for ray in rays]
        positive = [k for k, value in enumerate(values) if value > 0]
        negative = [k for k, value in enumerate(values) if value < 0]
        if not negative:
            masks = [mask | bit if value == 0 else mask for mask, value in zip(masks, values)]
            continue
        next_rays: list[tuple[int, ...]] = []
        next_masks: list[int] = []
        for k, value in enumerate(values):
            if value >= 0:
                next_rays.append(rays[k])
                next_masks.append(masks[k] | bit if value == 0 else masks[k])
        for p in positive:
            for q in negative:
                common = masks[p] & masks[q]
                if common.bit_count() < d - 2:
                    continue
                if any(r != p and r != q and masks[r] & common == common for r in range(len(rays))):
                    continue
                combined = [values[p] * a - values[q] * b for a, b in zip(rays[q], rays[p])]
                next_rays.append(_primitive(combined))
                next_masks.append(common | bit)
                if len(next_rays) > ray_limit:
                    raise RayLimitError(f"Double description exceeded {ray_limit} rays")
        rays, masks = next_rays, next_masks
    _LOGGER.debug("Dual cone of %d minimal vectors has %d extreme rays", len(vectors), len(rays))
    return tuple(sorted(rays))


def dual_extreme_rays(vertex: PerfectVertex) -> tuple[SymMatrix, ...]:
    """Extreme rays of the dual of the Voronoi cone, in primitive integral form, sorted."""

    return vertex.dual_rays


def _rays_for(vectors: tuple[LatticeVector, ...], settings: Settings) -> tuple[SymMatrix, ...]:
    n = len(vectors[0])
    return tuple(SymMatrix.from_upper_triangle(n, ray) for ray in _dual_ray_vectors(vectors, settings.ray_limit))


def vertex_from_minimum(
    matrix: SymMatrix, min_vectors: Iterable[LatticeVector], settings: Settings | None = None
) -> PerfectVertex:
    """Assemble a vertex whose minimal vectors are already known.

    Checks that every vector has value 1 and that their rank-1 matrices span
    the symmetric matrices; the minimum itself is not recomputed.
    """

    settings = settings or get_settings()
    vectors = tuple(sorted(set(min_vectors)))
    if not vectors:
        raise NotPerfectError("A vertex needs at least one minimal vector")
    for v in vectors:
        if quad_form(matrix, v) != 1:
            raise InconsistentStateError(f"Minimal vector {v} has value {quad_form(matrix, v)}, expected 1")
    if matrix_rank([_inequality(v) for v in vectors]) < symmetric_dimension(matrix.n):
        raise NotPerfectError(
            f"{len(vectors)} minimal vectors span less than the {symmetric_dimension(matrix.n)}-dimensional space"
        )
    return PerfectVertex(matrix=matrix, min_vectors=vectors, dual_rays=_rays_for(vectors, settings))


def make_vertex(p: SymMatrix, settings: Settings | None = None) -> PerfectVertex:
    """Rescale ``p`` to copositive minimum 1 and build its cone data."""

    settings = settings or get_settings()
    if not is_strictly_copositive(p):
        raise NotStrictlyCopositiveError("A vertex must be strictly copositive")
    minimum, vectors = copositive_minimum(p, settings=settings, assume_strict=True)
    return vertex_from_minimum(p.scale(1 / minimum), vectors, settings)


def _coefficient_rows(vectors: Sequence[LatticeVector]) -> list[list[int]]:
    n = len(vectors[0])
    return [[v[i] * v[j] for v in vectors] for i in range(n) for j in range(i, n)]


def membership(a: SymMatrix, vertex: PerfectVertex) -> MembershipResult:
    """Decide ``A`` in the Voronoi cone of ``vertex`` by a phase-one LP."""

    if a.n != vertex.n:
        raise DimensionMismatchError(f"Matrix of dimension {a.n} tested against a vertex of dimension {vertex.n}")
    vectors = vertex.min_vectors
    outcome = feasible_point(_coefficient_rows(vectors), ["="] * symmetric_dimension(a.n), list(a.upper_triangle()))
    if outcome.status is LpStatus.OPTIMAL:
        terms = [(alpha, v) for alpha, v in zip(outcome.solution, vectors) if alpha != 0]
        return MembershipResult(
            coefficients=outcome.solution,
            factorization=Factorization.from_terms(terms).sorted(),
            violations=(),
        )
    violations = tuple(ray for ray in dual_extreme_rays(vertex) if sym_inner(a, ray) < 0)
    if not violations:
        raise InconsistentStateError("Membership LP is infeasible but no dual ray separates the matrix")
    return MembershipResult(coefficients=None, factorization=None, violations=violations)


def caratheodory_reduce(f: Factorization) -> Factorization:
    """Same matrix, linearly independent rank-1 terms, positive coefficients."""

    merged: dict[LatticeVector, Fraction] = {}
    for alpha, v in f.terms:
        if alpha != 0 and any(v):
            merged[v] = merged.get(v, Fraction(0)) + alpha
    merged = {v: alpha for v, alpha in merged.items() if alpha != 0}
    if not merged:
        return Factorization(())
    vectors = sorted(merged)
    n = len(vectors[0])
    target = Factorization.from_terms((merged[v], v) for v in vectors).matrix(n)
    outcome = feasible_point(_coefficient_rows(vectors), ["="] * symmetric_dimension(n), list(target.upper_triangle()))
    if outcome.status is not LpStatus.OPTIMAL:
        raise ValueError("Factorization has negative coefficients and cannot be reduced")
    return Factorization.from_terms((alpha, v) for alpha, v in zip(outcome.solution, vectors) if alpha != 0)
