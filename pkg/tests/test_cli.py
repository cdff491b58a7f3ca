# tests/test_cli.py
import io
import json
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

import src.main as cli
from src.main import main
from src.models.reports import ValidationReport
from src.schemas.report import CoefficientFile
from src.utils.exceptions import ValidationInconclusiveError


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("DFC_LOG_DIR", str(tmp_path / "logs"))


def _run(argv):
    out = io.StringIO()
    code = main(argv, stdout=out)
    return code, out.getvalue()


def _write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_recurrence_of_exp():
    code, out = _run(["recurrence", "-e", "exp"])
    assert code == 0
    assert out.splitlines()[0] == "b_{-1}=-1, b_0=2n, b_1=1"


def test_recurrence_with_polygon():
    code, out = _run(["recurrence", "-e", "exp", "--polygon", "--json"])
    assert code == 0
    data = json.loads(out)
    assert set(data["slopes"]) == {"-1", "1"}
    assert data["singular_indices"] == []


def test_examples_are_listed():
    code, out = _run(["examples"])
    assert code == 0
    names = {line.split(":")[0] for line in out.splitlines()}
    assert {"exp", "hyperexp_sqrt", "cos_sin_order4", "cos_over_quadratic"} <= names


@pytest.mark.parametrize("argv", [
    [],
    ["approx", "-e", "exp", "-d", "0"],
    ["approx", "-e", "no_such_example", "-d", "5"],
    ["approx", "-i", "missing.json", "-d", "5"],
    ["sample", "-p", "missing.json"],
])
def test_bad_arguments_exit_with_input_error(argv):
    code, _ = _run(argv)
    assert code == 2


def test_malformed_problem_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    code, _ = _run(["approx", "-i", str(path), "-d", "5"])
    assert code == 2


def test_problem_with_both_condition_kinds_rejected(tmp_path):
    path = _write_json(tmp_path / "problem.json", {
        "operator": [["-1"], ["1"]],
        "initial_values": ["1"],
        "conditions": [{"terms": [{"order": 0, "point": "0"}], "target": "1"}],
    })
    code, _ = _run(["approx", "-i", path, "-d", "5"])
    assert code == 2


def test_approx_then_validate(tmp_path):
    coeffs = str(tmp_path / "coeffs.json")
    report = str(tmp_path / "report.json")
    code, _ = _run(["approx", "-e", "exp", "-d", "10", "-o", coeffs])
    assert code == 0
    data = json.loads(open(coeffs, encoding="utf-8").read())
    parsed = CoefficientFile.model_validate(data)
    assert len(parsed.coefficients) == 11
    assert data["N_used"] >= 10

    code, out = _run(["validate", "-e", "exp", "-p", coeffs, "--eps", f"1/{2 ** 60}", "-r", report])
    assert code == 0
    assert "<= ||y - p|| <=" in out
    written = json.loads(open(report, encoding="utf-8").read())
    assert written["status"] == "certified"
    assert Fraction(written["b"]) <= Fraction(written["B"])
    assert Fraction(written["B"]) < Fraction(1, 10 ** 9)


def test_solve_writes_coefficients_and_report(tmp_path):
    coeffs = str(tmp_path / "c.json")
    report = str(tmp_path / "r.json")
    code, _ = _run(["solve", "-e", "exp", "-d", "12", "-o", coeffs, "-r", report])
    assert code == 0
    written = json.loads(open(report, encoding="utf-8").read())
    assert written["epsilon_source"] == "auto"
    assert written["validation"]["status"] == "certified"
    assert set(written["timings"]) >= {"approx", "auto_eps", "validate"}
    assert set(written["heuristics"]) == {"tail_estimate", "minimax_lower_estimate", "near_minimax_factor"}
    coefficients = json.loads(open(coeffs, encoding="utf-8").read())
    assert Fraction(coefficients["error_bound"]) == Fraction(written["validation"]["B"])


def test_validate_defaults_to_automatic_eps(tmp_path):
    coeffs = str(tmp_path / "coeffs.json")
    report = str(tmp_path / "report.json")
    assert _run(["approx", "-e", "exp", "-d", "10", "-o", coeffs])[0] == 0
    code, _ = _run(["validate", "-e", "exp", "-p", coeffs, "-r", report])
    assert code == 0
    written = json.loads(open(report, encoding="utf-8").read())
    # eps near the squared error estimate leaves b and B within a small factor
    assert Fraction(written["epsilon"]) < Fraction(1, 10 ** 20)
    assert 0 < Fraction(written["b"]) and Fraction(written["B"]) <= 1000 * Fraction(written["b"])


def test_too_small_index_is_inconclusive_with_partial_report(tmp_path):
    # y' = 5y has A = 5, and 5^i / i! >= 1 for i = 1, 2, 3
    problem = _write_json(tmp_path / "grow.json", {"operator": [["-5"], ["1"]], "initial_values": ["1"]})
    coeffs = str(tmp_path / "c.json")
    report = str(tmp_path / "r.json")
    code, _ = _run(["solve", "-i", problem, "-d", "12", "--index", "1", "-o", coeffs, "-r", report])
    assert code == 3
    written = json.loads(open(report, encoding="utf-8").read())
    validation = written["validation"]
    assert validation["status"] == "inconclusive"
    assert validation["B"] is None and validation["gamma_i"] is None
    assert validation["i"] == 3
    assert Fraction(validation["b"]) >= 0
    assert "validate" in written["timings"]

    partial = str(tmp_path / "partial.json")
    code, _ = _run(["validate", "-i", problem, "-p", coeffs, "--index", "1", "--eps", "1/1024", "-r", partial])
    assert code == 3
    assert json.loads(open(partial, encoding="utf-8").read())["status"] == "inconclusive"


def test_solve_keeps_outputs_when_inconclusive(tmp_path, monkeypatch):
    partial = ValidationReport(B=Fraction(1), b=Fraction(0), A=Fraction(5), i=20,
                               gamma_i=Fraction(2), delta=Fraction(1, 2), D=4, epsilon=Fraction(1, 8))

    def inconclusive(*args, **kwargs):
        raise ValidationInconclusiveError("forced", report=partial)

    monkeypatch.setattr(cli, "validate", inconclusive)
    coeffs = str(tmp_path / "c.json")
    report = str(tmp_path / "r.json")
    code, _ = _run(["solve", "-e", "exp", "-d", "8", "--eps", "1/1024", "-o", coeffs, "-r", report])
    assert code == 3
    written = json.loads(open(report, encoding="utf-8").read())
    assert written["validation"]["status"] == "inconclusive"
    assert json.loads(open(coeffs, encoding="utf-8").read())["error_bound"] is None


def test_unexpected_failure_exits_with_internal_code(monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "approximate", broken)
    code, _ = _run(["approx", "-e", "exp", "-d", "5", "-o", "unused.json"])
    assert code == 4


def test_sample_constant(tmp_path):
    poly = _write_json(tmp_path / "one.json", {"coefficients": ["1"]})
    code, out = _run(["sample", "-p", poly, "-n", "3"])
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert list(frame.columns) == ["x", "value"]
    assert frame["x"].tolist() == pytest.approx([-1, 0, 1])
    assert frame["value"].tolist() == pytest.approx([1, 1, 1])


def test_sample_chebyshev_nodes_include_endpoints(tmp_path):
    poly = _write_json(tmp_path / "t2.json", {"coefficients": ["0", "0", "1"]})
    code, out = _run(["sample", "-p", poly, "-n", "3", "--nodes", "chebyshev"])
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert frame["x"].tolist() == pytest.approx([-1, 0, 1])
    assert frame["value"].tolist() == pytest.approx([1, -1, 1])


def test_sample_linear_to_csv(tmp_path):
    poly = _write_json(tmp_path / "t1.json", {"coefficients": ["0", "1"]})
    target = tmp_path / "samples.csv"
    code, _ = _run(["sample", "-p", poly, "-n", "5", "-o", str(target)])
    assert code == 0
    frame = pd.read_csv(target)
    row = frame[np.isclose(frame["x"], 0.5)]
    assert row["value"].iloc[0] == pytest.approx(0.5)


def test_sample_against_reference_on_other_interval(tmp_path):
    problem = _write_json(tmp_path / "exp02.json", {
        "name": "exp on [0, 2]",
        "operator": [["-1"], ["1"]],
        "initial_values": ["1"],
        "interval": ["0", "2"],
        "reference": "exp(x)",
    })
    coeffs = str(tmp_path / "c.json")
    assert _run(["approx", "-i", problem, "-d", "25", "-o", coeffs])[0] == 0
    code, out = _run(["sample", "-p", coeffs, "-i", problem, "-n", "21", "--nodes", "chebyshev"])
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert frame["error"].abs().max() < 1e-15


def test_expand_rational(tmp_path):
    code, out = _run(["expand-rational", "--num", "1", "--den", "2,-1", "--eps", "1/10000000000"])
    assert code == 0
    data = json.loads(out)
    assert Fraction(data["error_bound"]) <= Fraction(1, 10 ** 10)
    assert float(Fraction(data["coefficients"][0])) == pytest.approx(3 ** -0.5, abs=1e-9)


def test_expand_rational_rejects_root_in_interval():
    code, _ = _run(["expand-rational", "--num", "1", "--den", "0,1", "--eps", "1/100"])
    assert code == 2
