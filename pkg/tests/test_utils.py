import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from smoothspace.config import ToleranceConfig, load_env, parse_tolerances
from smoothspace.errors import ConfigError, ParseError
from smoothspace.exact import ExactComplex
from smoothspace.models import CoefficientRow, load_counterexample_config, load_embedding_problem
from smoothspace.utils import dump_json, to_json

FIXTURES = Path(__file__).parent / "fixtures"


def test_to_json_handles_numbers():
    text = to_json({"b": Fraction(1, 3), "a": 2j, "c": np.int64(4), "d": np.array([1.5])})
    assert json.loads(text) == {
        "a": {"re": 0.0, "im": 2.0},
        "b": {"num": 1, "den": 3},
        "c": 4,
        "d": [1.5],
    }
    assert text.index('"a"') < text.index('"b"')
    with pytest.raises(TypeError):
        to_json({"x": object()})


def test_dump_json_creates_parents(tmp_path: Path):
    path = tmp_path / "out" / "report.json"
    dump_json(path, {"ok": True})
    assert json.loads(path.read_text(encoding="utf-8")) == {"ok": True}


def test_parse_tolerances():
    assert parse_tolerances(None) == ToleranceConfig()
    config = parse_tolerances("residual=1e-8, rank=1e-12")
    assert (config.residual, config.rank) == (1e-8, 1e-12)
    assert parse_tolerances("1e-6").residual == 1e-6
    for bad in ("speed=1", "rank=abc", "rank=0", "quadrature=-1"):
        with pytest.raises(ConfigError):
            parse_tolerances(bad)


def test_load_env(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("SMOOTHSPACE_TOL", "zero_set=1e-6")
    monkeypatch.setenv("SMOOTHSPACE_LOG_LEVEL", "debug")
    env = load_env()
    assert env.tolerances.zero_set == 1e-6
    assert env.tolerances.residual == 1e-9
    assert env.log_level == "DEBUG"


def test_coefficient_rows():
    assert CoefficientRow(m=1, n=1, re=1, im={"num": 1, "den": 2}).coefficient() == ExactComplex.of(
        1, Fraction(1, 2)
    )
    assert not CoefficientRow(m=1, n=1, re=0.5).coefficient().exact


def test_load_fixtures():
    problem = load_embedding_problem(FIXTURES / "embedding_single_mode.json")
    assert (problem.k, problem.l, problem.N) == (1, 1, 1)
    assert problem.exact
    cfg = load_counterexample_config(FIXTURES / "counterexample_case1.json")
    assert cfg.a1 == [0, 1]
    assert cfg.window == "auto"


def test_invalid_inputs_raise_parse_errors(tmp_path: Path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_embedding_problem(path)
    path.write_text('{"k": 0, "l": 1, "N": 1, "mus": []}', encoding="utf-8")
    with pytest.raises(ParseError):
        load_embedding_problem(path)
    path.write_text('{"k": 1, "l": 1, "N": 1, "delta": "a quarter"}', encoding="utf-8")
    with pytest.raises(ParseError):
        load_counterexample_config(path)
