"""Matrix, certificate and trace file formats.

Rationals are always written as strings ``"p/q"`` (or ``"p"`` for integers)
in lowest terms; floats are rejected on input.
"""

from __future__ import annotations

import enum
import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import IO, Literal

from pydantic import BaseModel, Field, StrictInt, StrictStr, ValidationError

from cpsimplex.engine.cones import Factorization
from cpsimplex.engine.linalg import SymMatrix, to_rational
from cpsimplex.engine.walk import Certificate, CertificateKind, TraceEvent, WalkConfig


class MatrixFormatError(ValueError):
    """Raised when a matrix or certificate file cannot be parsed."""


class Frame(str, enum.Enum):
    UNIT = "unit"
    DOUBLED = "doubled"

    @property
    def factor(self) -> int:
        return 2 if self is Frame.DOUBLED else 1


class MatrixFile(BaseModel):
    """Schema of a JSON matrix file."""

    n: StrictInt = Field(..., ge=1, description="Matrix dimension")
    entries: list[list[StrictStr | StrictInt]] = Field(..., description="Rows of rationals 'p/q' or integers")

    def to_matrix(self) -> SymMatrix:
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise MatrixFormatError(f"Expected {self.n} rows of {self.n} entries")
        return _matrix_from_rows(self.entries)


class TermModel(BaseModel):
    coefficient: StrictStr = Field(..., description="Rational coefficient 'p/q'")
    vector: list[StrictInt] = Field(..., description="Nonnegative integer vector")


class CertificateMetadata(BaseModel):
    iterations: int
    attempts: int = 1
    pivot_rule: str
    seed: int
    frame: Frame = Frame.UNIT
    wall_time_seconds: str = Field(..., description="Elapsed time, for information only")


class CertificateFile(BaseModel):
    """Self-contained certificate; verification needs only this and the input matrix."""

    kind: Literal["factorization", "witness", "iteration-limit"]
    n: StrictInt = Field(..., ge=1)
    terms: list[TermModel] | None = None
    witness: list[list[StrictStr]] | None = None
    witness_source: str | None = None
    last_vertex: list[list[StrictStr]] | None = None
    last_objective: StrictStr | None = None
    metadata: CertificateMetadata | None = None

    def to_factorization(self) -> Factorization:
        if self.terms is None:
            raise MatrixFormatError("Certificate has no factorization terms")
        try:
            return Factorization.from_terms((to_rational(term.coefficient), term.vector) for term in self.terms)
        except (TypeError, ValueError) as exc:
            raise MatrixFormatError(f"Invalid factorization term: {exc}") from exc

    def to_witness(self) -> SymMatrix:
        if self.witness is None:
            raise MatrixFormatError("Certificate has no witness matrix")
        return _matrix_from_rows(self.witness)


def _matrix_from_rows(rows: list[list[str]] | list[list[str | int]]) -> SymMatrix:
    try:
        return SymMatrix.from_rows(rows)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(str(exc)) from exc


def format_rational(value: Fraction) -> str:
    return str(value)


def matrix_rows(matrix: SymMatrix, frame: Frame = Frame.UNIT) -> list[list[str]]:
    return [[format_rational(entry * frame.factor) for entry in row] for row in matrix.rows]


def parse_matrix(text: str) -> SymMatrix:
    """Parse the JSON matrix format or a plain whitespace-separated matrix."""

    stripped = text.strip()
    if not stripped:
        raise MatrixFormatError("Matrix input is empty")
    if stripped.startswith("{"):
        try:
            return MatrixFile.model_validate_json(stripped).to_matrix()
        except ValidationError as exc:
            raise MatrixFormatError(f"Invalid matrix file: {exc}") from exc
    rows = [line.split() for line in stripped.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if any(len(row) != len(rows) for row in rows):
        raise MatrixFormatError(f"Plain matrix must be square; got {len(rows)} rows of lengths {[len(r) for r in rows]}")
    return _matrix_from_rows(rows)


def serialize_matrix(matrix: SymMatrix, frame: Frame = Frame.UNIT) -> str:
    """Canonical JSON form: fixed field order, one row per line."""

    rows = ",\n".join(f"    {json.dumps(row)}" for row in matrix_rows(matrix, frame))
    return f'{{\n  "n": {matrix.n},\n  "entries": [\n{rows}\n  ]\n}}\n'


def load_matrix(path: str | Path) -> SymMatrix:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def matrix_digest(matrix: SymMatrix, frame: Frame = Frame.UNIT) -> str:
    return hashlib.sha256(serialize_matrix(matrix, frame).encode("utf-8")).hexdigest()


def certificate_to_file(
    certificate: Certificate,
    cfg: WalkConfig,
    *,
    elapsed: float,
    frame: Frame = Frame.UNIT,
) -> CertificateFile:
    n = certificate.last_vertex.n
    metadata = CertificateMetadata(
        iterations=certificate.iterations,
        attempts=certificate.attempts,
        pivot_rule=cfg.pivot_rule.value,
        seed=certificate.seed,
        frame=frame,
        wall_time_seconds=f"{elapsed:.3f}",
    )
    if certificate.kind is CertificateKind.FACTORIZATION and certificate.factorization is not None:
        terms = [
            TermModel(coefficient=format_rational(alpha), vector=list(v))
            for alpha, v in certificate.factorization.sorted().terms
        ]
        return CertificateFile(kind="factorization", n=n, terms=terms, metadata=metadata)
    if certificate.kind is CertificateKind.WITNESS and certificate.witness is not None:
        # only a vertex witness lives in a frame; pivot rays are already primitive
        witness_frame = frame if certificate.witness_source == "vertex" else Frame.UNIT
        return CertificateFile(
            kind="witness",
            n=n,
            witness=matrix_rows(certificate.witness, witness_frame),
            witness_source=certificate.witness_source,
            metadata=metadata,
        )
    return CertificateFile(
        kind="iteration-limit",
        n=n,
        last_vertex=matrix_rows(certificate.last_vertex.matrix, frame),
        last_objective=format_rational(certificate.objective * frame.factor),
        metadata=metadata,
    )


def parse_certificate(text: str) -> CertificateFile:
    try:
        return CertificateFile.model_validate_json(text)
    except ValidationError as exc:
        raise MatrixFormatError(f"Invalid certificate file: {exc}") from exc


def load_certificate(path: str | Path) -> CertificateFile:
    return parse_certificate(Path(path).read_text(encoding="utf-8"))


def serialize_certificate(certificate: CertificateFile) -> str:
    return certificate.model_dump_json(indent=2, exclude_none=True) + "\n"


def trace_record(event: TraceEvent, frame: Frame = Frame.UNIT) -> dict[str, object]:
    """One line of the trace; the vertices together form the outer approximation."""

    return {
        "iteration": event.iteration,
        "vertex_sha256": matrix_digest(event.vertex, frame),
        "objective": format_rational(event.objective * frame.factor),
        "pivot_index": event.pivot_index,
        "new_vectors": [list(v) for v in event.new_vectors],
        "vertex": matrix_rows(event.vertex, frame),
    }


def write_trace(events: tuple[TraceEvent, ...], stream: IO[str], frame: Frame = Frame.UNIT) -> None:
    for event in events:
        stream.write(json.dumps(trace_record(event, frame)) + "\n")
