"""Exact cp-factorizations and copositive witnesses by walking COP-perfect vertices."""

from .engine.walk import CertificateKind, WalkConfig, factorize

__all__ = ["CertificateKind", "WalkConfig", "factorize"]
