"""Exact rational and integer linear algebra.

Everything in the engine works on :class:`fractions.Fraction` scalars and
Python integers; no floating point value ever enters a computation. Symmetric
matrices are flattened in row-major upper-triangle order, ``(0,0), (0,1), ...,
(0,n-1), (1,1), ..., (n-1,n-1)``, wherever they are treated as vectors of the
``n(n+1)/2``-dimensional space of symmetric matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

LatticeVector = tuple[int, ...]
IntMatrix = list[list[int]]


class DimensionMismatchError(ValueError):
    """Raised when operands do not share a dimension."""


class NotSymmetricError(ValueError):
    """Raised when a matrix handed to :class:`SymMatrix` is not symmetric."""


class SingularMatrixError(ValueError):
    """Raised when a full-rank matrix is required but a singular one is given."""


def to_rational(value: Any) -> Fraction:
    """Convert ``value`` to an exact rational, rejecting floats.

    Accepted: ``int``, ``Fraction`` and strings such as ``"25"``, ``"-3/2"``
    or ``"63.43"``. Booleans and floats raise :class:`TypeError`; malformed
    strings and zero denominators raise :class:`ValueError`.
    """

    if isinstance(value, bool):
        raise TypeError("Cannot convert bool to an exact rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"Cannot convert float to an exact rational (got {value!r})")
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("Empty string is not a rational number")
        try:
            return Fraction(text)
        except ZeroDivisionError as exc:
            raise ValueError(f"Zero denominator in {value!r}") from exc
    raise TypeError(f"Unsupported scalar type {type(value).__name__}")


def symmetric_dimension(n: int) -> int:
    return n * (n + 1) // 2


@dataclass(frozen=True)
class SymMatrix:
    """Immutable symmetric ``n x n`` matrix with rational entries.

    Symmetry is checked exactly on construction. Instances are hashable and
    compare by value, so they can key caches and sets.
    """

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        if n == 0:
            raise DimensionMismatchError("SymMatrix needs dimension n >= 1")
        for row in self.rows:
            if len(row) != n:
                raise DimensionMismatchError("Matrix is not square")
        for i in range(n):
            for j in range(i + 1, n):
                if self.rows[i][j] != self.rows[j][i]:
                    raise NotSymmetricError(f"Entry ({i},{j}) differs from entry ({j},{i})")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]]) -> SymMatrix:
        return cls(tuple(tuple(to_rational(entry) for entry in row) for row in rows))

    @classmethod
    def from_upper_triangle(cls, n: int, values: Sequence[Any]) -> SymMatrix:
        """Inverse of :meth:`upper_triangle`."""

        if len(values) != symmetric_dimension(n):
            raise DimensionMismatchError(
                f"Expected {symmetric_dimension(n)} upper-triangle values for n={n}, got {len(values)}"
            )
        grid = [[Fraction(0)] * n for _ in range(n)]
        position = 0
        for i in range(n):
            for j in range(i, n):
                value = to_rational(values[position])
                grid[i][j] = value
                grid[j][i] = value
                position += 1
        return cls(tuple(tuple(row) for row in grid))

    @classmethod
    def zeros(cls, n: int) -> SymMatrix:
        return cls(tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)))

    @classmethod
    def identity(cls, n: int) -> SymMatrix:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.rows[i][j]

    def _check_same_dimension(self, other: SymMatrix) -> None:
        if self.n != other.n:
            raise DimensionMismatchError(f"Dimension {self.n} does not match dimension {other.n}")

    def __add__(self, other: SymMatrix) -> SymMatrix:
        self._check_same_dimension(other)
        return SymMatrix(
            tuple(tuple(a + b for a, b in zip(row, other_row)) for row, other_row in zip(self.rows, other.rows))
        )

    def __sub__(self, other: SymMatrix) -> SymMatrix:
        self._check_same_dimension(other)
        return SymMatrix(
            tuple(tuple(a - b for a, b in zip(row, other_row)) for row, other_row in zip(self.rows, other.rows))
        )

    def __neg__(self) -> SymMatrix:
        return SymMatrix(tuple(tuple(-a for a in row) for row in self.rows))

    def scale(self, factor: Any) -> SymMatrix:
        c = to_rational(factor)
        return SymMatrix(tuple(tuple(c * a for a in row) for row in self.rows))

    def __mul__(self, factor: Any) -> SymMatrix:
        return self.scale(factor)

    __rmul__ = __mul__

    def upper_triangle(self) -> tuple[Fraction, ...]:
        return tuple(self.rows[i][j] for i in range(self.n) for j in range(i, self.n))

    def principal(self, indices: Sequence[int]) -> SymMatrix:
        """Principal submatrix on ``indices`` (kept in the given order)."""

        return SymMatrix(tuple(tuple(self.rows[i][j] for j in indices) for i in indices))

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.rows for a in row)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for row in self.rows for a in row)

    def primitive(self) -> SymMatrix:
        """Positive multiple with integral entries whose gcd is 1."""

        if self.is_zero():
            return self
        entries = self.upper_triangle()
        denominator = math.lcm(*(a.denominator for a in entries))
        numerators = [int(a * denominator) for a in entries]
        content = math.gcd(*numerators)
        return self.scale(Fraction(denominator, content))

    def as_lists(self) -> list[list[Fraction]]:
        return [list(row) for row in self.rows]


def sym_inner(a: SymMatrix, b: SymMatrix) -> Fraction:
    """Trace inner product ``<A, B> = sum_ij A_ij B_ij``."""

    a._check_same_dimension(b)
    return sum((x * y for row_a, row_b in zip(a.rows, b.rows) for x, y in zip(row_a, row_b)), Fraction(0))


def _check_vector(b: SymMatrix, v: Sequence[int]) -> None:
    if len(v) != b.n:
        raise DimensionMismatchError(f"Vector of length {len(v)} does not match dimension {b.n}")


def quad_form(b: SymMatrix, v: Sequence[int]) -> Fraction:
    """``B[v] = v^T B v``, equal to ``sym_inner(B, rank1(v))``."""

    _check_vector(b, v)
    total = Fraction(0)
    for i, vi in enumerate(v):
        if vi:
            total += vi * sum((entry * vj for entry, vj in zip(b.rows[i], v) if vj), Fraction(0))
    return total


def bilinear(b: SymMatrix, v: Sequence[int], w: Sequence[int]) -> Fraction:
    _check_vector(b, v)
    _check_vector(b, w)
    return sum(
        (vi * sum((entry * wj for entry, wj in zip(b.rows[i], w) if wj), Fraction(0)) for i, vi in enumerate(v) if vi),
        Fraction(0),
    )


def rank1(v: Sequence[int]) -> SymMatrix:
    if not v:
        raise DimensionMismatchError("rank1 needs a vector of length >= 1")
    return SymMatrix(tuple(tuple(Fraction(a * b) for b in v) for a in v))


def gram_an(n: int) -> SymMatrix:
    """Gram matrix of the root lattice A_n: 2 on the diagonal, -1 beside it."""

    if n < 1:
        raise ValueError("gram_an needs n >= 1")
    return SymMatrix(
        tuple(
            tuple(Fraction(2) if i == j else Fraction(-1) if abs(i - j) == 1 else Fraction(0) for j in range(n))
            for i in range(n)
        )
    )


def consecutive_ones(n: int) -> tuple[LatticeVector, ...]:
    """The ``n (n + 1) / 2`` vectors ``e_i + ... + e_j``, the minimal vectors of ``Q_{A_n}``."""

    return tuple(sorted(tuple(int(i <= k < j) for k in range(n)) for i in range(n) for j in range(i + 1, n + 1)))


def jarre_matrix(n: int, m: int) -> SymMatrix:
    """``[[n I_m, J], [J, m I_n]]``, completely positive with cp-rank ``n m``."""

    if n < 1 or m < 1:
        raise ValueError("jarre_matrix needs n >= 1 and m >= 1")
    size = n + m

    def entry(i: int, j: int) -> Fraction:
        if (i < m) != (j < m):
            return Fraction(1)
        if i != j:
            return Fraction(0)
        return Fraction(n if i < m else m)

    return SymMatrix(tuple(tuple(entry(i, j) for j in range(size)) for i in range(size)))


def _reduce_rows(rows: list[list[Fraction]], ncols: int) -> list[int]:
    """Bring ``rows`` to reduced row echelon form in place.

    Only the first ``ncols`` columns are used as pivot candidates so that an
    augmented right-hand side can ride along. Returns the pivot columns.
    """

    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        if rank == len(rows):
            break
        found = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if found is None:
            continue
        rows[rank], rows[found] = rows[found], rows[rank]
        lead = rows[rank][col]
        pivot_row = [entry / lead for entry in rows[rank]]
        rows[rank] = pivot_row
        for i, row in enumerate(rows):
            factor = row[col]
            if i != rank and factor != 0:
                rows[i] = [a - factor * b for a, b in zip(row, pivot_row)]
        pivots.append(col)
        rank += 1
    return pivots


def matrix_rank(vectors: Sequence[Sequence[Any]]) -> int:
    if not vectors:
        return 0
    rows = [[to_rational(x) for x in vector] for vector in vectors]
    return len(_reduce_rows(rows, len(rows[0])))


def linearly_independent(mats: Sequence[SymMatrix]) -> bool:
    """True iff the matrices are independent in the space of symmetric matrices."""

    if not mats:
        return True
    for mat in mats[1:]:
        mats[0]._check_same_dimension(mat)
    return matrix_rank([mat.upper_triangle() for mat in mats]) == len(mats)


def solve_cone_coefficients(generators: Sequence[SymMatrix], target: SymMatrix) -> list[Fraction] | None:
    """Coefficients ``c`` with ``sum c_k G_k = target``, or ``None`` outside the span.

    The generators are expected to be linearly independent, which makes the
    coefficients unique. Signs are not checked here.
    """

    if not generators:
        return [] if target.is_zero() else None
    for generator in generators:
        target._check_same_dimension(generator)
    flats = [generator.upper_triangle() for generator in generators]
    goal = target.upper_triangle()
    rows = [[flat[p] for flat in flats] + [goal[p]] for p in range(len(goal))]
    count = len(generators)
    pivots = _reduce_rows(rows, count)
    for row in rows[len(pivots):]:
        if row[count] != 0:
            return None
    coefficients = [Fraction(0)] * count
    for row, col in zip(rows, pivots):
        coefficients[col] = row[count]
    return coefficients


def _check_square(matrix: Sequence[Sequence[Any]]) -> int:
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix):
        raise DimensionMismatchError("Expected a non-empty square matrix")
    return n


def int_identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def int_matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    if not a or len(a[0]) != len(b):
        raise DimensionMismatchError("Inner dimensions do not agree")
    columns = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in columns] for row in a]


def int_matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> LatticeVector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def determinant(matrix: Sequence[Sequence[Any]]) -> Fraction:
    n = _check_square(matrix)
    rows = [[to_rational(x) for x in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        found = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if found is None:
            return Fraction(0)
        if found != col:
            rows[col], rows[found] = rows[found], rows[col]
            det = -det
        lead = rows[col][col]
        det *= lead
        for i in range(col + 1, n):
            factor = rows[i][col] / lead
            if factor:
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[col])]
    return det


def rational_inverse(matrix: Sequence[Sequence[Any]]) -> list[list[Fraction]]:
    n = _check_square(matrix)
    rows = [
        [to_rational(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)
    ]
    if len(_reduce_rows(rows, n)) < n:
        raise SingularMatrixError("Matrix is singular")
    return [row[n:] for row in rows]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    # x * a + y * b == g throughout
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def _combine(row_a: list[int], row_b: list[int], s: int, t: int) -> list[int]:
    return [s * x + t * y for x, y in zip(row_a, row_b)]


def hnf(matrix: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form ``W = U @ V``.

    ``U`` is unimodular and ``W`` is upper triangular with a positive
    diagonal; entries above each diagonal entry are reduced into
    ``[0, W_kk)``. Raises :class:`SingularMatrixError` for rank-deficient input.
    """

    n = _check_square(matrix)
    w = [[int(x) for x in row] for row in matrix]
    u = int_identity(n)
    for k in range(n):
        for i in range(k + 1, n):
            b = w[i][k]
            if b == 0:
                continue
            a = w[k][k]
            s, t, g = _xgcd(a, b)
            a_g, b_g = a // g, b // g
            # [[s, t], [-b/g, a/g]] has determinant 1
            w[k], w[i] = _combine(w[k], w[i], s, t), _combine(w[k], w[i], -b_g, a_g)
            u[k], u[i] = _combine(u[k], u[i], s, t), _combine(u[k], u[i], -b_g, a_g)
        if w[k][k] == 0:
            raise SingularMatrixError("Matrix does not have full rank")
        if w[k][k] < 0:
            w[k] = [-x for x in w[k]]
            u[k] = [-x for x in u[k]]
        for r in range(k):
            q = w[r][k] // w[k][k]
            if q:
                w[r] = _combine(w[r], w[k], 1, -q)
                u[r] = _combine(u[r], u[k], 1, -q)
    return u, w
