import json
from pathlib import Path

import pytest

from cpsimplex import main as cli
from cpsimplex.settings import clear_cached_settings

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture(autouse=True)
def clear_settings(monkeypatch):
    for name in ("CPSIMPLEX_MAX_ITER", "CPSIMPLEX_THREADS", "CPSIMPLEX_VERIFY_VERTICES"):
        monkeypatch.delenv(name, raising=False)
    clear_cached_settings()
    yield
    clear_cached_settings()


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _run(capsys, *argv):
    code = cli.main(list(argv))
    payload = json.loads(capsys.readouterr().out)
    return code, payload


def test_generate_and_check_strict_copositivity(tmp_path, capsys):
    target = str(tmp_path / "a4.json")

    code, payload = _run(capsys, "generate", "gram-an", "4", "--output", target)

    assert code == 0
    assert payload["status"] == "success"
    assert payload["result"]["n"] == 4
    assert payload["result"]["entries"][0] == ["2", "-1", "0", "0"]

    code, payload = _run(capsys, "check-copositive", target, "--strict")

    assert code == 0
    assert payload["result"] == {"strict": True, "copositive": True, "failing_indices": None}


def test_generate_jarre_needs_two_sizes(capsys):
    code, payload = _run(capsys, "generate", "jarre", "2")

    assert code == 2
    assert payload["status"] == "error"


def test_check_copositive_hyperbolic_plane(tmp_path, capsys):
    path = _write(tmp_path, "h.txt", "0 1\n1 0\n")

    strict_code, strict = _run(capsys, "check-copositive", path, "--strict")
    plain_code, plain = _run(capsys, "check-copositive", path)

    assert strict_code == 1
    assert strict["result"]["failing_indices"] == [0]
    assert plain_code == 0
    assert plain["result"]["copositive"] is True


def test_check_copositive_negative_scalar(tmp_path, capsys):
    code, payload = _run(capsys, "check-copositive", _write(tmp_path, "m.txt", "-1\n"))

    assert code == 1
    assert payload["result"]["copositive"] is False


def test_factorize_then_verify(tmp_path, capsys):
    matrix = _write(tmp_path, "a.txt", "5 2\n2 1\n")
    certificate = str(tmp_path / "cert.json")

    code, payload = _run(capsys, "factorize", matrix, "--output", certificate)

    assert code == 0
    assert payload["result"]["kind"] == "factorization"
    assert payload["result"]["metadata"]["pivot_rule"] == "greedy"

    code, payload = _run(capsys, "verify", matrix, certificate)

    assert code == 0
    assert payload["result"]["valid"] is True


def test_factorize_witness_exit_code(tmp_path, capsys):
    matrix = _write(tmp_path, "a.txt", "1 -1\n-1 3\n")
    certificate = str(tmp_path / "cert.json")

    code, payload = _run(capsys, "factorize", matrix, "--output", certificate)

    assert code == 10
    assert payload["result"]["witness"] == [["0", "1"], ["1", "0"]]

    code, payload = _run(capsys, "verify", matrix, certificate)

    assert code == 0
    assert payload["result"]["inner_product"] == "-2"


def test_factorize_iteration_limit_and_trace(tmp_path, capsys):
    matrix = _write(tmp_path, "a.txt", "9801 6930\n6930 4900\n")
    certificate = str(tmp_path / "cert.json")
    trace = tmp_path / "trace.jsonl"

    code, payload = _run(
        capsys,
        "factorize",
        matrix,
        "--max-iter",
        "3",
        "--frame",
        "doubled",
        "--trace",
        str(trace),
        "--output",
        certificate,
    )

    assert code == 20
    assert payload["result"]["kind"] == "iteration-limit"
    assert payload["result"]["last_vertex"] == [["6", "-9"], ["-9", "14"]]
    lines = [json.loads(line) for line in trace.read_text(encoding="utf-8").splitlines()]
    assert [line["iteration"] for line in lines] == [1, 2, 3]
    assert lines[1]["vertex"] == [["2", "-3"], ["-3", "6"]]

    code, payload = _run(capsys, "verify", matrix, certificate)

    assert code == 1
    assert payload["result"]["valid"] is False


def test_verify_rejects_certificate_of_another_matrix(tmp_path, capsys):
    certificate = str(tmp_path / "cert.json")
    _run(capsys, "factorize", _write(tmp_path, "a.txt", "5 2\n2 1\n"), "--output", certificate)

    code, payload = _run(capsys, "verify", _write(tmp_path, "b.txt", "5 2\n2 2\n"), certificate)

    assert code == 1
    assert payload["result"]["valid"] is False


def test_verify_dimension_mismatch(tmp_path, capsys):
    code, payload = _run(
        capsys, "verify", _write(tmp_path, "a.txt", "1 0\n0 1\n"), str(DATA / "nie_witness.json")
    )

    assert code == 2
    assert "dimension" in payload["message"]


def test_verify_published_witness(capsys):
    code, payload = _run(capsys, "verify", str(DATA / "nie_5x5.json"), str(DATA / "nie_witness.json"))

    assert code == 0
    assert payload["result"]["inner_product"] == "-2/5"


def test_parse_errors_exit_with_usage_status(tmp_path, capsys):
    path = _write(tmp_path, "bad.json", '{"n": 1, "entries": [["1/0"]]}')

    code, payload = _run(capsys, "factorize", path)

    assert code == 2
    assert payload == {"status": "error", "command": "factorize", "message": payload["message"]}

    code, _ = _run(capsys, "factorize", str(tmp_path / "missing.json"))

    assert code == 2


def test_non_symmetric_input_exit_with_usage_status(tmp_path, capsys):
    code, _ = _run(capsys, "check-copositive", _write(tmp_path, "a.txt", "1 2\n3 4\n"))

    assert code == 2


def test_copositive_minimum_command(tmp_path, capsys):
    path = _write(tmp_path, "a2.txt", "2 -1\n-1 2\n")

    code, payload = _run(capsys, "copositive-min", path)

    assert code == 0
    assert payload["result"]["minimum"] == "2"
    assert payload["result"]["vectors"] == [[0, 1], [1, 0], [1, 1]]

    threaded_code, threaded = _run(capsys, "copositive-min", path, "--threads", "2")

    assert threaded_code == 0
    assert threaded["result"] == payload["result"]

    code, payload = _run(capsys, "copositive-min", _write(tmp_path, "h.txt", "0 1\n1 0\n"))

    assert code == 1
    assert payload["result"] == {"strictly_copositive": False}


def test_bad_environment_setting(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("CPSIMPLEX_THREADS", "many")
    clear_cached_settings()

    code, payload = _run(capsys, "factorize", _write(tmp_path, "a.txt", "1 0\n0 1\n"))

    assert code == 2
    assert "CPSIMPLEX_THREADS" in payload["message"]


def test_threads_flag_is_validated(tmp_path, capsys):
    code, _ = _run(capsys, "factorize", _write(tmp_path, "a.txt", "1 0\n0 1\n"), "--threads", "0")

    assert code == 2


def test_unexpected_errors_exit_with_status_three(tmp_path, monkeypatch, capsys):
    def explode(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr("cpsimplex.main.factorize", explode)

    code, payload = _run(capsys, "factorize", _write(tmp_path, "a.txt", "1 0\n0 1\n"))

    assert code == 3
    assert payload["message"] == "Unexpected error: boom"
