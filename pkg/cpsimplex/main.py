"""Command-line entry point.

Every command prints one JSON envelope on stdout, either
``{"status": "success", "command": ..., "result": ...}`` or
``{"status": "error", "command": ..., "message": ...}``, and exits with a
command-specific status. Logs go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from cpsimplex.engine.copositive_min import NotStrictlyCopositiveError, copositive_minimum
from cpsimplex.engine.copositivity import first_failure, is_strictly_copositive
from cpsimplex.engine.linalg import DimensionMismatchError, SymMatrix, gram_an, jarre_matrix, sym_inner
from cpsimplex.engine.walk import (
    CertificateKind,
    PivotRule,
    WalkConfig,
    factorize,
    verify_factorization,
    verify_witness,
)
from cpsimplex.fileio import (
    Frame,
    MatrixFormatError,
    certificate_to_file,
    format_rational,
    load_certificate,
    load_matrix,
    serialize_certificate,
    serialize_matrix,
    write_trace,
)
from cpsimplex.logs import get_logger
from cpsimplex.settings import ConfigurationError, Settings, get_settings

_LOGGER = get_logger("cli")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_UNEXPECTED = 3
EXIT_WITNESS = 10
EXIT_ITERATION_LIMIT = 20

_FACTORIZE_EXIT = {
    CertificateKind.FACTORIZATION: EXIT_OK,
    CertificateKind.WITNESS: EXIT_WITNESS,
    CertificateKind.ITERATION_LIMIT: EXIT_ITERATION_LIMIT,
}

CommandResult = tuple[int, Mapping[str, Any]]


def _settings(args: argparse.Namespace) -> Settings:
    settings = get_settings()
    threads = getattr(args, "threads", None)
    if threads is not None:
        if threads < 1:
            raise ConfigurationError("--threads must be at least 1")
        settings = dataclasses.replace(settings, threads=threads)
    return settings


def _cmd_factorize(args: argparse.Namespace) -> CommandResult:
    settings = _settings(args)
    a = load_matrix(args.input)
    cfg = WalkConfig(
        pivot_rule=args.pivot_rule,
        rng_seed=args.seed,
        max_iterations=args.max_iter if args.max_iter is not None else settings.max_iterations,
        emit_trace=args.trace is not None,
        restarts=args.restarts,
    )
    frame = Frame(args.frame)
    started = time.perf_counter()
    certificate = factorize(a, cfg, settings)
    elapsed = time.perf_counter() - started

    document = certificate_to_file(certificate, cfg, elapsed=elapsed, frame=frame)
    if args.output:
        Path(args.output).write_text(serialize_certificate(document), encoding="utf-8")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as stream:
            write_trace(certificate.trace, stream, frame)
    if certificate.kind is CertificateKind.ITERATION_LIMIT:
        _LOGGER.warning("Iteration limit of %d reached without a certificate", cfg.max_iterations)
    return _FACTORIZE_EXIT[certificate.kind], document.model_dump(mode="json", exclude_none=True)


def _cmd_verify(args: argparse.Namespace) -> CommandResult:
    a = load_matrix(args.input)
    document = load_certificate(args.certificate)
    if document.n != a.n:
        raise DimensionMismatchError(f"Certificate has dimension {document.n}, matrix has dimension {a.n}")
    if document.kind == "factorization":
        valid = verify_factorization(a, document.to_factorization())
        detail: dict[str, Any] = {"terms": len(document.terms or [])}
    elif document.kind == "witness":
        witness = document.to_witness()
        valid = verify_witness(a, witness)
        detail = {"inner_product": format_rational(sym_inner(witness, a))}
    else:
        valid = False
        detail = {"reason": "an iteration-limit certificate makes no claim"}
    if not valid:
        _LOGGER.warning("Certificate of kind %s does not verify against %s", document.kind, args.input)
    return (EXIT_OK if valid else EXIT_NEGATIVE), {"kind": document.kind, "valid": valid, **detail}


def _cmd_check_copositive(args: argparse.Namespace) -> CommandResult:
    b = load_matrix(args.input)
    failing = first_failure(b, strict=args.strict)
    result = {
        "strict": args.strict,
        "copositive": failing is None,
        "failing_indices": None if failing is None else list(failing),
    }
    return (EXIT_OK if failing is None else EXIT_NEGATIVE), result


def _cmd_copositive_min(args: argparse.Namespace) -> CommandResult:
    settings = _settings(args)
    b = load_matrix(args.input)
    if not is_strictly_copositive(b):
        return EXIT_NEGATIVE, {"strictly_copositive": False}
    minimum, vectors = copositive_minimum(b, settings=settings, assume_strict=True)
    return EXIT_OK, {
        "strictly_copositive": True,
        "minimum": format_rational(minimum),
        "vectors": [list(v) for v in sorted(vectors)],
    }


def _cmd_generate(args: argparse.Namespace) -> CommandResult:
    if args.family == "gram-an":
        matrix: SymMatrix = gram_an(args.n)
    else:
        if args.m is None:
            raise ValueError("generate jarre needs both N and M")
        matrix = jarre_matrix(args.n, args.m)
    text = serialize_matrix(matrix)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK, json.loads(text)


_SUPPORTED_COMMANDS: Mapping[str, Callable[[argparse.Namespace], CommandResult]] = {
    "factorize": _cmd_factorize,
    "verify": _cmd_verify,
    "check-copositive": _cmd_check_copositive,
    "copositive-min": _cmd_copositive_min,
    "generate": _cmd_generate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cp-simplex",
        description="Exact cp-factorizations and copositive witnesses for rational symmetric matrices.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    factor = commands.add_parser("factorize", help="Walk COP-perfect vertices until a certificate is found")
    factor.add_argument("input", help="Matrix file (JSON or whitespace-separated)")
    factor.add_argument("--pivot-rule", choices=[rule.value for rule in PivotRule], default=PivotRule.GREEDY.value)
    factor.add_argument("--seed", type=int, default=0, help="Seed for the random pivot rule")
    factor.add_argument("--max-iter", type=int, default=None, help="Iteration cap (default CPSIMPLEX_MAX_ITER or 10000)")
    factor.add_argument("--restarts", type=int, default=0, help="Extra random walks after an iteration limit")
    factor.add_argument("--trace", default=None, help="Write one JSON line per iteration to this path")
    factor.add_argument("--frame", choices=[frame.value for frame in Frame], default=Frame.UNIT.value)
    factor.add_argument("--threads", type=int, default=None, help="Worker threads for cone enumeration")
    factor.add_argument("--output", default=None, help="Also write the certificate to this path")

    verify = commands.add_parser("verify", help="Check a certificate against a matrix exactly")
    verify.add_argument("input")
    verify.add_argument("certificate")

    check = commands.add_parser("check-copositive", help="Exact copositivity test")
    check.add_argument("input")
    check.add_argument("--strict", action="store_true", help="Test strict copositivity instead")

    minimum = commands.add_parser("copositive-min", help="Copositive minimum and its minimal vectors")
    minimum.add_argument("input")
    minimum.add_argument("--threads", type=int, default=None)

    generate = commands.add_parser("generate", help="Write a matrix file for a known family")
    generate.add_argument("family", choices=["gram-an", "jarre"])
    generate.add_argument("n", type=int)
    generate.add_argument("m", type=int, nargs="?", default=None)
    generate.add_argument("--output", default=None)
    return parser


def _format_success(command: str, result: Mapping[str, Any]) -> str:
    return json.dumps({"status": "success", "command": command, "result": result}, default=str)


def _format_error(command: str, message: str) -> str:
    return json.dumps({"status": "error", "command": command, "message": message})


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = _SUPPORTED_COMMANDS[args.command]
    _LOGGER.info("Running command %s", args.command)
    try:
        code, result = handler(args)
    except (
        MatrixFormatError,
        DimensionMismatchError,
        NotStrictlyCopositiveError,
        ConfigurationError,
        OSError,
        ValueError,
    ) as exc:
        _LOGGER.warning("Command %s failed: %s", args.command, exc)
        print(_format_error(args.command, str(exc)))
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        _LOGGER.error("Command %s raised unexpected error", args.command, exc_info=True)
        print(_format_error(args.command, f"Unexpected error: {exc}"))
        return EXIT_UNEXPECTED
    print(_format_success(args.command, result))
    return code


if __name__ == "__main__":
    sys.exit(main())
