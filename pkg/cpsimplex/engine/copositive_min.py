"""Copositive minimum and short nonnegative lattice vectors.

For a strictly copositive ``B`` the standard simplex is split into simplices
``conv{v_1..v_n}`` with ``v_i^T B v_j > 0`` for all pairs. Inside each
simplicial cone ``x = V a`` with ``a >= 0`` the form ``a^T G a``
(``G = V^T B V``) has only positive entries, which bounds every coordinate.
Integral ``x`` are exactly those with ``y = W a`` integral, where ``W = U V`` is
the Hermite normal form of ``V``; the backtracking walks ``y_n, ..., y_1``.

All of it runs on integers: ``B`` is scaled by the least common denominator
of its entries and ``a`` by ``det W``, which makes both ``a`` and ``G``
integral.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, TypeVar

from cpsimplex.engine.copositivity import is_strictly_copositive
from cpsimplex.engine.linalg import LatticeVector, SymMatrix, hnf, int_matvec, to_rational
from cpsimplex.logs import get_logger
from cpsimplex.settings import Settings, get_settings

_LOGGER = get_logger("copositive_min")

_T = TypeVar("_T")


class NotStrictlyCopositiveError(ValueError):
    """Raised when an operation needs a strictly copositive matrix."""


class RefinementLimitError(RuntimeError):
    """Raised when the simplex partition exceeds the configured number of cones."""


IntRows = tuple[tuple[int, ...], ...]


def integral_form(b: SymMatrix) -> tuple[int, IntRows]:
    """``(d, d B)`` with ``d`` the least common denominator of the entries of ``B``."""

    scale = math.lcm(*(entry.denominator for row in b.rows for entry in row))
    return scale, tuple(tuple(int(entry * scale) for entry in row) for row in b.rows)


def _int_bilinear(form: IntRows, v: LatticeVector, w: LatticeVector) -> int:
    return sum(vi * sum(entry * wj for entry, wj in zip(form[i], w)) for i, vi in enumerate(v) if vi)


@dataclass(frozen=True)
class SimplicialCone:
    """Cone over integral generators with cached Hermite data.

    ``transform`` is ``U`` and ``hermite`` is ``W = U V`` (``V`` has the
    generators as columns). ``gram`` is ``V^T (d B) V`` with ``d = scale``.
    """

    generators: tuple[LatticeVector, ...]
    transform: IntRows
    hermite: IntRows
    gram: IntRows
    scale: int

    @classmethod
    def build(
        cls, b: SymMatrix, generators: tuple[LatticeVector, ...], gram: IntRows | None = None
    ) -> SimplicialCone:
        """``gram``, when given, must already be ``V^T (d B) V`` for ``d`` from :func:`integral_form`."""

        n = len(generators)
        scale, form = integral_form(b)
        if gram is None:
            gram = tuple(tuple(_int_bilinear(form, vi, vj) for vj in generators) for vi in generators)
        columns = [[generators[j][i] for j in range(n)] for i in range(n)]
        u, w = hnf(columns)
        return cls(
            generators=generators,
            transform=tuple(map(tuple, u)),
            hermite=tuple(map(tuple, w)),
            gram=gram,
            scale=scale,
        )

    @property
    def determinant(self) -> int:
        """``|det V|``, the product of the Hermite diagonal."""

        return math.prod(self.hermite[k][k] for k in range(len(self.hermite)))

    def gram_entry(self, i: int, j: int) -> Fraction:
        """``v_i^T B v_j``."""

        return Fraction(self.gram[i][j], self.scale)

    def contains(self, x: LatticeVector) -> bool:
        """Whether ``x`` lies in the closed cone."""

        n = len(self.generators)
        y = int_matvec(self.transform, x)
        alpha = [Fraction(0)] * n
        for k in range(n - 1, -1, -1):
            tail = sum((self.hermite[k][j] * alpha[j] for j in range(k + 1, n)), Fraction(0))
            alpha[k] = (y[k] - tail) / self.hermite[k][k]
            if alpha[k] < 0:
                return False
        return True


@dataclass(frozen=True)
class Partition:
    matrix: SymMatrix
    cones: tuple[SimplicialCone, ...]


def _require_strict(b: SymMatrix, assume_strict: bool) -> None:
    if not assume_strict and not is_strictly_copositive(b):
        raise NotStrictlyCopositiveError("Matrix is not strictly copositive")


def _split(
    simplex: tuple[LatticeVector, ...], gram: IntRows, i: int, j: int
) -> list[tuple[tuple[LatticeVector, ...], IntRows]]:
    # m = (s_j v_i + s_i v_j) / content projects to the midpoint of the edge on the standard simplex
    vi, vj = simplex[i], simplex[j]
    p, q = sum(vj), sum(vi)
    mid = [p * a + q * c for a, c in zip(vi, vj)]
    content = math.gcd(*mid)
    m = tuple(x // content for x in mid)
    row = [(p * gram[i][k] + q * gram[j][k]) // content for k in range(len(simplex))]
    diagonal = (p * p * gram[i][i] + 2 * p * q * gram[i][j] + q * q * gram[j][j]) // (content * content)
    children = []
    for r in (j, i):
        rows = [list(line) for line in gram]
        for k in range(len(simplex)):
            rows[r][k] = rows[k][r] = row[k]
        rows[r][r] = diagonal
        children.append((simplex[:r] + (m,) + simplex[r + 1 :], tuple(map(tuple, rows))))
    return children


def build_partition(b: SymMatrix, settings: Settings | None = None) -> Partition:
    """Split the standard simplex until every pair of vertices has ``v_i^T B v_j > 0``.

    The edge with the smallest normalized product is bisected first, ties
    going to the lexicographically first pair. A vertex with ``B[v] <= 0``
    proves ``B`` is not strictly copositive.
    """

    settings = settings or get_settings()
    n = b.n
    scale, form = integral_form(b)
    unit = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    stack: list[tuple[tuple[LatticeVector, ...], IntRows]] = [(unit, form)]
    cones: list[SimplicialCone] = []
    processed = 0
    while stack:
        simplex, gram = stack.pop()
        processed += 1
        if processed > settings.partition_limit:
            raise RefinementLimitError(
                f"Simplex partition exceeded {settings.partition_limit} simplices; "
                "the matrix is probably not strictly copositive"
            )
        for k, v in enumerate(simplex):
            if gram[k][k] <= 0:
                raise NotStrictlyCopositiveError(f"B{list(v)} = {Fraction(gram[k][k], scale)} is not positive")
        sums = [sum(v) for v in simplex]
        worst: tuple[Fraction, int, int] | None = None
        for i in range(n):
            for j in range(i + 1, n):
                if gram[i][j] > 0:
                    continue
                product = Fraction(gram[i][j], sums[i] * sums[j])
                if worst is None or product < worst[0]:
                    worst = (product, i, j)
        if worst is None:
            cones.append(SimplicialCone.build(b, simplex, gram))
            continue
        _, i, j = worst
        stack.extend(_split(simplex, gram, i, j))
    _LOGGER.debug("Partition of dimension %d has %d cones (%d simplices visited)", n, len(cones), processed)
    return Partition(matrix=b, cones=tuple(cones))


class _ConeSearch:
    """Backtracking over ``y_n, ..., y_1`` inside one simplicial cone.

    Coordinates are ``A = det(W) a`` and values are ``B[x]`` times
    ``d det(W)^2``, so every quantity is an integer. With ``shrink`` set the
    bound drops to the best value seen, so only the minimal vectors survive.
    """

    def __init__(self, cone: SimplicialCone, bound: Fraction, *, strict: bool, shrink: bool) -> None:
        self.cone = cone
        self.shrink = shrink
        self.det = cone.determinant
        self.scale = cone.scale * self.det * self.det
        limit = bound * self.scale
        # inclusive integer cap on scaled values
        self.cap = math.ceil(limit) - 1 if strict else math.floor(limit)
        self.found: dict[LatticeVector, int] = {}
        n = len(cone.generators)
        self.alpha = [0] * n

    def run(self) -> dict[LatticeVector, Fraction]:
        self._level(len(self.alpha) - 1, 0)
        return {x: Fraction(value, self.scale) for x, value in self.found.items()}

    def _record(self, value: int) -> None:
        if value == 0:
            return
        generators = self.cone.generators
        x = tuple(
            sum(v[i] * a for v, a in zip(generators, self.alpha)) // self.det for i in range(len(self.alpha))
        )
        if self.shrink and value < self.cap:
            self.cap = value
            self.found.clear()
        self.found[x] = value

    def _level(self, k: int, partial: int) -> None:
        gram = self.cone.gram
        hermite = self.cone.hermite
        alpha = self.alpha
        n = len(alpha)
        c = sum(hermite[k][j] * alpha[j] for j in range(k + 1, n))
        s = sum(gram[k][j] * alpha[j] for j in range(k + 1, n))
        g = gram[k][k]
        diagonal = hermite[k][k]
        # g A^2 + 2 s A + partial <= cap, and g A + s <= isqrt(disc) for integral A
        disc = s * s + g * (self.cap - partial)
        if disc < 0:
            return
        a_max = (math.isqrt(disc) - s) // g
        low = -(-c // self.det)
        high = (diagonal * a_max + c) // self.det
        for yk in range(low, high + 1):
            a = (self.det * yk - c) // diagonal
            value = partial + a * (2 * s + g * a)
            if value > self.cap:
                break
            alpha[k] = a
            if k == 0:
                self._record(value)
            else:
                self._level(k - 1, value)
        alpha[k] = 0


def _map_cones(
    search: Callable[[SimplicialCone], _T], cones: Iterable[SimplicialCone], settings: Settings
) -> list[_T]:
    pending = list(cones)
    if settings.threads > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            return list(pool.map(search, pending))
    return [search(cone) for cone in pending]


def _search_cones(
    partition: Partition, bound: Fraction, strict: bool, settings: Settings
) -> dict[LatticeVector, Fraction]:
    def search(cone: SimplicialCone) -> dict[LatticeVector, Fraction]:
        return _ConeSearch(cone, bound, strict=strict, shrink=False).run()

    merged: dict[LatticeVector, Fraction] = {}
    for found in _map_cones(search, partition.cones, settings):
        merged.update(found)
    return merged


def enumerate_below(
    b: SymMatrix,
    bound: Any,
    strict: bool = False,
    *,
    settings: Settings | None = None,
    assume_strict: bool = False,
) -> frozenset[LatticeVector]:
    """All ``v`` in ``Z^n_{>=0} \\ {0}`` with ``B[v] <= bound`` (``< bound`` if ``strict``).

    Vectors on facets shared by several cones are reported once.
    """

    settings = settings or get_settings()
    limit = to_rational(bound)
    if limit <= 0:
        raise ValueError("enumerate_below needs a positive bound")
    _require_strict(b, assume_strict)
    partition = build_partition(b, settings)
    found = _search_cones(partition, limit, strict, settings)
    _LOGGER.debug("Found %d vectors below %s in %d cones", len(found), limit, len(partition.cones))
    return frozenset(found)


def copositive_minimum(
    b: SymMatrix, *, settings: Settings | None = None, assume_strict: bool = False
) -> tuple[Fraction, frozenset[LatticeVector]]:
    """``minC(B)`` and the finite set ``MinC(B)`` of vectors attaining it.

    Run on one thread, every cone starts from the best value found so far.
    Worker threads all start from ``min_i B_ii`` and the results are merged.
    """

    settings = settings or get_settings()
    _require_strict(b, assume_strict)
    partition = build_partition(b, settings)
    bound = min(b[i, i] for i in range(b.n))
    if settings.threads > 1:

        def search(cone: SimplicialCone) -> dict[LatticeVector, Fraction]:
            return _ConeSearch(cone, bound, strict=False, shrink=True).run()

        results = _map_cones(search, partition.cones, settings)
    else:
        results = []
        for cone in partition.cones:
            found = _ConeSearch(cone, bound, strict=False, shrink=True).run()
            if found:
                bound = min(bound, *found.values())
            results.append(found)
    # the unit vector of the smallest diagonal entry lies in some cone
    minimum = min(value for found in results for value in found.values())
    best = {v for found in results for v, value in found.items() if value == minimum}
    return minimum, frozenset(best)
