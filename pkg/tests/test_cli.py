import json
import math
from pathlib import Path

import pytest
from typer.testing import CliRunner

from smoothspace.cli import app, main
from smoothspace.trig import TrigPoly, read_trigpoly

FIXTURES = Path(__file__).parent / "fixtures"
runner = CliRunner()


def _json(args: list[str]) -> dict:
    result = runner.invoke(app, args)
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_classify_gradient():
    payload = _json(["classify", "d1", "d2"])
    assert payload["outcome"] == "NotComplemented"
    assert payload["rule"] == "theorem-main"


def test_classify_square_and_root():
    payload = _json(["classify", "d1^2+2 d1 d2+d2^2", "d1+d2"])
    assert payload["outcome"] == "IsomorphicCK"


def test_classify_from_file(tmp_path: Path):
    path = tmp_path / "ops.txt"
    path.write_text("d1^3\n# anisotropic\nd2^2\n", encoding="utf-8")
    assert _json(["classify", "--file", str(path)])["outcome"] == "NotComplemented"


def test_strict_mode_and_input_errors():
    undecided = runner.invoke(app, ["classify", "id", "d1 + 1.41421356 d2", "--strict"])
    assert undecided.exit_code == 1
    assert runner.invoke(app, ["classify", "d1 +"]).exit_code == 2
    assert runner.invoke(app, ["classify"]).exit_code == 2
    assert runner.invoke(app, ["classify", "d1", "--tol", "speed=1"]).exit_code == 2


def test_diagram():
    payload = _json(["diagram", "d1^2", "d2^3"])
    assert payload["coreNodes"] == [[2, 0], [0, 3]]


def test_solve(tmp_path: Path):
    problem = str(FIXTURES / "embedding_single_mode.json")
    payload = _json(["solve", problem])
    assert payload["residual"] == 0.0
    assert payload["exact"] is True
    assert payload["parityVerified"] is True
    assert [(row["m"], row["n"]) for row in payload["phis"][0]] == [(1, 1)]
    result = runner.invoke(app, ["solve", problem, "--output-dir", str(tmp_path / "out")])
    assert result.exit_code == 0
    assert read_trigpoly(tmp_path / "out" / "phi_1.jsonl") == TrigPoly.monomial(1, 1)


def test_verify_embedding_problem():
    problem = str(FIXTURES / "embedding_single_mode.json")
    payload = _json(["verify", "embedding", "--problem", problem])
    assert payload["ratio"] == pytest.approx(1 / (4 * math.pi))


def test_verify_dominance_and_multiplier():
    payload = _json(["verify", "dominance", "d1 d2", "--node", "1,1", "--M", "16"])
    assert payload["constants"][0] == pytest.approx(1 / (4 * math.pi**2))
    payload = _json(["verify", "multiplier", "--M", "8", "--M", "16", "--Mmax", "64"])
    assert len(payload["tails"]) == 2
    assert runner.invoke(app, ["verify", "multiplier", "--sign=-1"]).exit_code == 2


def test_verify_counterexample():
    payload = _json(["verify", "counterexample", "--Pmax", "256"])
    assert payload["case"] == "case-1"
    assert payload["window"] == "small_t"
    assert payload["cpqMax"] <= 1.25
    bad = runner.invoke(app, ["verify", "counterexample", "--window", "wide"])
    assert bad.exit_code == 2


def test_verify_gn():
    payload = _json(["verify", "gn", "--grid", "24", "--samples", "3"])
    assert payload["violations"] == 0


def test_selftest():
    payload = _json(["selftest"])
    assert payload["ok"] is True
    assert len(payload["cases"]) == 7


def test_main_returns_exit_codes(capsys: pytest.CaptureFixture[str]):
    assert main(["classify", "d1", "d2"]) == 0
    assert json.loads(capsys.readouterr().out)["outcome"] == "NotComplemented"
    assert main(["classify", "d1 $"]) == 2
