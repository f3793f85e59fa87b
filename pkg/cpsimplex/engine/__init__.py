"""Exact arithmetic engine for the copositive simplex walk."""

from .cones import Factorization, PerfectVertex, make_vertex, membership
from .linalg import SymMatrix, gram_an
from .walk import Certificate, CertificateKind, PivotRule, WalkConfig, factorize

__all__ = [
    "Certificate",
    "CertificateKind",
    "Factorization",
    "PerfectVertex",
    "PivotRule",
    "SymMatrix",
    "WalkConfig",
    "factorize",
    "gram_an",
    "make_vertex",
    "membership",
]
