import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothspace.errors import ParseError
from smoothspace.exact import ExactComplex
from smoothspace.newton import build_diagram
from smoothspace.operators import DiffOperator
from smoothspace.parser import format_operator, parse_operator, read_operator_file, tokenize

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.mark.parametrize(
    "name", ["diagram_square.json", "diagram_parabola.json", "diagram_irrational.json"]
)
def test_diagrams_match_hand_derived_fixtures(name):
    payload = json.loads((FIXTURES / name).read_text(encoding="utf-8"))
    op = parse_operator(payload["expr"])
    assert build_diagram([op]).as_dict() == payload["diagram"]


def test_parabola_coefficient_is_exact():
    op = parse_operator("2*pi*i*d1 - d2^2")
    assert op.exact
    assert op.coefficient((1, 0)) == ExactComplex.of(0, 2, 1)
    assert op.coefficient((0, 2)) == ExactComplex.of(-1)
    assert format_operator(op) == "-d2^2 + 2*pi*i*d1"


def test_decimals_mark_the_operator_inexact():
    op = parse_operator("d1 + 1.41421356 d2")
    assert not op.exact
    assert op.coefficient((0, 1)).to_complex() == 1.41421356
    assert parse_operator("d1 + 2e0 d2").exact is False


def test_implicit_products_and_identity():
    assert parse_operator("2 d1 d2") == DiffOperator.monomial(1, 1, 2)
    assert parse_operator("id") == DiffOperator.identity()
    assert parse_operator("-3/4*d1^2 + 1/pi") == DiffOperator.from_terms(
        {(2, 0): Fraction(-3, 4), (0, 0): ExactComplex.of(1, 0, -1)}
    )
    assert format_operator(DiffOperator.zero()) == "0"


@pytest.mark.parametrize(
    ("text", "position"),
    [("d1 +", 4), ("d1 $ d2", 3), ("d1^65", 3), ("/2 d1", 0), ("d1 / d2", 5), ("", 0)],
)
def test_errors_carry_positions(text, position):
    with pytest.raises(ParseError) as info:
        parse_operator(text)
    assert info.value.position == position


def test_tokens_report_offsets():
    tokens = tokenize("d1^2 + pi")
    assert [(t.kind, t.position) for t in tokens] == [
        ("d1", 0),
        ("^", 2),
        ("number", 3),
        ("+", 5),
        ("pi", 7),
        ("eof", 9),
    ]


def test_operator_file_skips_comments(tmp_path: Path):
    path = tmp_path / "ops.txt"
    path.write_text("# pair\nd1\n\nd2  # second\n", encoding="utf-8")
    assert read_operator_file(path) == [DiffOperator.monomial(1, 0), DiffOperator.monomial(0, 1)]
    path.write_text("d1\nd1 +\n", encoding="utf-8")
    with pytest.raises(ParseError, match="ops.txt:2"):
        read_operator_file(path)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=16)
coefficients = st.builds(
    ExactComplex.of, rationals, rationals, st.integers(min_value=-2, max_value=2)
)
exponents = st.tuples(st.integers(0, 8), st.integers(0, 8))
operators = st.lists(st.tuples(exponents, coefficients), max_size=6).map(DiffOperator.from_terms)


@settings(max_examples=1000, deadline=None)
@given(operators)
def test_format_then_parse_is_identity(op):
    assert parse_operator(format_operator(op)) == op


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(
            exponents,
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda v: v != 0),
        ),
        min_size=1,
        max_size=4,
    )
)
def test_inexact_round_trip(terms):
    op = DiffOperator.from_terms([(mi, float(v)) for mi, v in terms])
    assert parse_operator(format_operator(op)) == op
