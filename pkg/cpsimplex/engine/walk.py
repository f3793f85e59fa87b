"""The simplex-like walk over vertices of the Ryshkov-type polyhedron.

Starting from ``Q_{A_n} / 2`` the walk moves along edges in the direction of
dual extreme rays that ``A`` violates, strictly decreasing ``<A, P>``. It stops
with one of three certificates:

* a factorization, once ``A`` lies in the Voronoi cone of the current vertex;
* a copositive witness ``W`` with ``<W, A> < 0``, either the vertex itself or
  a copositive pivot ray;
* an iteration limit, which makes no claim about ``A``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from pydantic import BaseModel, ConfigDict, Field

from cpsimplex.engine.cones import (
    Factorization,
    InconsistentStateError,
    PerfectVertex,
    caratheodory_reduce,
    dual_extreme_rays,
    make_vertex,
    membership,
    vertex_from_minimum,
)
from cpsimplex.engine.copositive_min import enumerate_below
from cpsimplex.engine.copositivity import is_copositive, is_strictly_copositive
from cpsimplex.engine.linalg import (
    DimensionMismatchError,
    LatticeVector,
    SymMatrix,
    consecutive_ones,
    gram_an,
    quad_form,
    sym_inner,
)
from cpsimplex.logs import get_logger
from cpsimplex.settings import Settings, get_settings

_LOGGER = get_logger("walk")


class NoPivotError(ValueError):
    """Raised when a pivot is requested but no dual ray is violated."""


class EdgeSearchError(RuntimeError):
    """Raised when no contiguous vertex is found along a pivot ray."""


class PivotRule(str, enum.Enum):
    GREEDY = "greedy"
    RANDOM = "random"
    FIRST = "first"


class WalkConfig(BaseModel):
    """Options for a single :func:`factorize` call."""

    model_config = ConfigDict(frozen=True)

    pivot_rule: PivotRule = Field(default=PivotRule.GREEDY, description="Choice among violated dual rays")
    rng_seed: int = Field(default=0, description="Seed for the random pivot rule")
    max_iterations: int = Field(default=10000, ge=1, description="Vertices visited before giving up")
    emit_trace: bool = Field(default=False, description="Record one trace event per iteration")
    restarts: int = Field(default=0, ge=0, description="Extra random walks after an iteration limit")


class CertificateKind(str, enum.Enum):
    FACTORIZATION = "factorization"
    WITNESS = "witness"
    ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class TraceEvent:
    iteration: int
    vertex: SymMatrix
    objective: Fraction
    new_vectors: tuple[LatticeVector, ...]
    pivot_index: int | None = None
    pivot_ray: SymMatrix | None = None


class OuterApproximation:
    """``{Q : <Q, B> >= 0}`` over the visited vertices ``B``; contains every cp matrix."""

    def __init__(self, vertices: Iterable[SymMatrix] = ()) -> None:
        self._vertices: list[SymMatrix] = list(vertices)

    def add(self, vertex: SymMatrix) -> None:
        self._vertices.append(vertex)

    @property
    def vertices(self) -> tuple[SymMatrix, ...]:
        return tuple(self._vertices)

    def separating_vertex(self, q: SymMatrix) -> SymMatrix | None:
        return next((b for b in self._vertices if sym_inner(q, b) < 0), None)

    def contains(self, q: SymMatrix) -> bool:
        return self.separating_vertex(q) is None


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    iterations: int
    last_vertex: PerfectVertex
    objective: Fraction
    factorization: Factorization | None = None
    witness: SymMatrix | None = None
    witness_source: str | None = None
    trace: tuple[TraceEvent, ...] = ()
    visited: tuple[SymMatrix, ...] = field(default=(), repr=False)
    attempts: int = 1
    seed: int = 0

    def outer_approximation(self) -> OuterApproximation:
        return OuterApproximation(self.visited)


def initial_vertex(n: int, settings: Settings | None = None) -> PerfectVertex:
    """The vertex ``Q_{A_n} / 2``; its minimal vectors are the consecutive-ones vectors."""

    return _initial_vertex(n, settings or get_settings())


@lru_cache(maxsize=16)
def _initial_vertex(n: int, settings: Settings) -> PerfectVertex:
    return vertex_from_minimum(gram_an(n).scale(Fraction(1, 2)), consecutive_ones(n), settings)


def _greedy_key(a: SymMatrix, ray: SymMatrix) -> tuple[Fraction, tuple[Fraction, ...]]:
    # all candidates have <A,R> < 0, so a larger <A,R>^2/<R,R> is a more negative normalized value
    value = sym_inner(a, ray)
    return (-(value * value) / sym_inner(ray, ray), ray.upper_triangle())


def select_pivot(
    a: SymMatrix,
    vertex: PerfectVertex,
    cfg: WalkConfig,
    *,
    candidates: Sequence[SymMatrix] | None = None,
    rng: random.Random | None = None,
) -> SymMatrix:
    """Choose one dual ray ``R`` with ``<A, R> < 0`` according to ``cfg.pivot_rule``."""

    if candidates is None:
        candidates = [ray for ray in dual_extreme_rays(vertex) if sym_inner(a, ray) < 0]
    if not candidates:
        raise NoPivotError("No dual extreme ray is violated by the matrix")
    if cfg.pivot_rule is PivotRule.FIRST:
        return candidates[0]
    if cfg.pivot_rule is PivotRule.RANDOM:
        return (rng or random.Random(cfg.rng_seed)).choice(list(candidates))
    return min(candidates, key=lambda ray: _greedy_key(a, ray))


def contiguous_vertex(vertex: PerfectVertex, ray: SymMatrix, settings: Settings | None = None) -> PerfectVertex:
    """Neighbor ``N = P + l R`` of ``vertex`` along the edge in direction ``ray``."""

    settings = settings or get_settings()
    if is_copositive(ray):
        raise EdgeSearchError("Pivot ray is copositive; the edge is unbounded")
    p = vertex.matrix
    low, up = Fraction(0), Fraction(1)
    shorter: frozenset[LatticeVector] = frozenset()
    for _ in range(settings.bisection_limit):
        trial = p + ray.scale(up)
        if not is_strictly_copositive(trial):
            up = (low + up) / 2
            continue
        shorter = enumerate_below(trial, 1, strict=True, settings=settings, assume_strict=True)
        if shorter:
            break
        low, up = up, 2 * up
    else:
        raise EdgeSearchError(f"No contiguous vertex found within {settings.bisection_limit} rounds")

    step = min((1 - quad_form(p, v)) / quad_form(ray, v) for v in shorter)
    neighbor = p + ray.scale(step)
    kept = [v for v in vertex.min_vectors if quad_form(ray, v) == 0]
    new = [v for v in shorter if quad_form(neighbor, v) == 1]
    if settings.verify_vertices:
        checked = make_vertex(neighbor, settings)
        if checked.matrix != neighbor or set(checked.min_vectors) != set(kept) | set(new):
            raise InconsistentStateError("Contiguous vertex disagrees with a full recomputation")
        return checked
    return vertex_from_minimum(neighbor, kept + new, settings)


def _walk(a: SymMatrix, cfg: WalkConfig, settings: Settings, seed: int, attempt: int) -> Certificate:
    rng = random.Random(seed)
    vertex = initial_vertex(a.n, settings)
    objective = sym_inner(a, vertex.matrix)
    new_vectors = vertex.min_vectors
    trace: list[TraceEvent] = []
    visited: list[SymMatrix] = []

    def finish(kind: CertificateKind, iteration: int, **payload: object) -> Certificate:
        _LOGGER.info("Walk finished with %s after %d iterations (attempt %d)", kind.value, iteration, attempt)
        return Certificate(
            kind=kind,
            iterations=iteration,
            last_vertex=vertex,
            objective=objective,
            trace=tuple(trace),
            visited=tuple(visited),
            attempts=attempt,
            seed=seed,
            **payload,  # type: ignore[arg-type]
        )

    for iteration in range(1, cfg.max_iterations + 1):
        visited.append(vertex.matrix)
        event = TraceEvent(iteration=iteration, vertex=vertex.matrix, objective=objective, new_vectors=new_vectors)
        if objective < 0:
            if cfg.emit_trace:
                trace.append(event)
            return finish(CertificateKind.WITNESS, iteration, witness=vertex.matrix, witness_source="vertex")

        result = membership(a, vertex)
        if result.factorization is not None:
            if cfg.emit_trace:
                trace.append(event)
            reduced = caratheodory_reduce(result.factorization).sorted()
            return finish(CertificateKind.FACTORIZATION, iteration, factorization=reduced)

        ray = select_pivot(a, vertex, cfg, candidates=result.violations, rng=rng)
        if cfg.emit_trace:
            trace.append(
                TraceEvent(
                    iteration=iteration,
                    vertex=vertex.matrix,
                    objective=objective,
                    new_vectors=new_vectors,
                    pivot_index=dual_extreme_rays(vertex).index(ray),
                    pivot_ray=ray,
                )
            )
        if is_copositive(ray):
            return finish(CertificateKind.WITNESS, iteration, witness=ray, witness_source="ray")
        if iteration == cfg.max_iterations:
            break

        neighbor = contiguous_vertex(vertex, ray, settings)
        next_objective = sym_inner(a, neighbor.matrix)
        if next_objective >= objective:
            raise InconsistentStateError(f"Objective did not decrease: {objective} -> {next_objective}")
        previous = set(vertex.min_vectors)
        new_vectors = tuple(v for v in neighbor.min_vectors if v not in previous)
        _LOGGER.info(
            "Iteration %d: objective %s -> %s, %d new minimal vectors",
            iteration,
            objective,
            next_objective,
            len(new_vectors),
        )
        vertex, objective = neighbor, next_objective

    return finish(CertificateKind.ITERATION_LIMIT, cfg.max_iterations)


def factorize(a: SymMatrix, cfg: WalkConfig | None = None, settings: Settings | None = None) -> Certificate:
    """Walk from the initial vertex until ``A`` is certified in or out of the cp cone."""

    cfg = cfg or WalkConfig()
    settings = settings or get_settings()
    attempts = 1 + cfg.restarts if cfg.pivot_rule is PivotRule.RANDOM else 1
    _LOGGER.info("Starting walk: n=%d pivot_rule=%s seed=%d", a.n, cfg.pivot_rule.value, cfg.rng_seed)
    certificate = _walk(a, cfg, settings, cfg.rng_seed, 1)
    for attempt in range(1, attempts):
        if certificate.kind is not CertificateKind.ITERATION_LIMIT:
            break
        _LOGGER.info("Restarting random walk with seed %d", cfg.rng_seed + attempt)
        certificate = _walk(a, cfg, settings, cfg.rng_seed + attempt, attempt + 1)
    return certificate


def verify_factorization(a: SymMatrix, f: Factorization) -> bool:
    if not f.is_nonnegative():
        return False
    try:
        return f.matrix(a.n) == a
    except DimensionMismatchError:
        return False


def verify_witness(a: SymMatrix, w: SymMatrix) -> bool:
    if a.n != w.n:
        return False
    return sym_inner(w, a) < 0 and is_copositive(w)
