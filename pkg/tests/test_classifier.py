import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothspace.classifier import (
    ClassifyOptions,
    Outcome,
    check_theorem_main,
    classify,
    directional_rule,
    ellipticity_check,
    normalize_collection,
    try_substitution,
    verdict_to_json,
    zero_set_rule,
)
from smoothspace.errors import EmptyCollection
from smoothspace.newton import build_diagram
from smoothspace.operators import DiffOperator, MultiIndex
from smoothspace.parser import parse_operator


def _ops(*texts: str) -> list[DiffOperator]:
    return [parse_operator(t) for t in texts]


BATTERY = [
    (("d1", "d2"), Outcome.NOT_COMPLEMENTED, "theorem-main"),
    (("d1^3", "d2^2"), Outcome.NOT_COMPLEMENTED, "theorem-main"),
    (("d1^2 + 2 d1 d2 + d2^2", "d1 + 2 d2"), Outcome.NOT_COMPLEMENTED, "substitution"),
    (("d1^2 + 2 d1 d2 + d2^2", "d1 + d2"), Outcome.ISOMORPHIC_CK, "no-admissible-lines"),
    (("2*pi*i*d1 - d2^2",), Outcome.NOT_COMPLEMENTED, "single-operator-zero-set"),
    (("id", "d1 + 1.41421356 d2"), Outcome.UNDECIDED, None),
    (("d1^2 d2 + d1 d2^2", "id", "d1"), Outcome.ISOMORPHIC_CK, "directional-factorization"),
    (("d1 d2",), Outcome.ISOMORPHIC_CK, "no-admissible-lines"),
    (("d1^2 + d2^2",), Outcome.ISOMORPHIC_CK, "ellipticity"),
    (("d1 - 1.41421356 d2",), Outcome.ISOMORPHIC_CK, "single-operator-coset-ring"),
]


@pytest.mark.parametrize(("texts", "outcome", "rule"), BATTERY)
def test_example_collections(texts, outcome, rule):
    verdict = classify(_ops(*texts))
    assert verdict.outcome is outcome
    assert verdict.rule == rule


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from(BATTERY),
    st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(bool),
)
def test_nonzero_scaling_keeps_the_verdict(case, factor):
    texts, outcome, rule = case
    verdict = classify([op.scale(factor) for op in _ops(*texts)])
    assert verdict.outcome is outcome
    assert verdict.rule == rule


def test_gradient_witness_names_the_line_and_parts():
    verdict = classify(_ops("d1", "d2"))
    assert verdict.witnesses["seniorParts"] == ["d1", "d2"]
    assert verdict.witnesses["operatorIndices"] == [0, 1]
    assert verdict.witnesses["line"]["nodes"] == [[1, 0], [0, 1]]
    assert not verdict.inexact


def test_substitution_witness_carries_the_matrix():
    verdict = classify(_ops("d1^2 + 2 d1 d2 + d2^2", "d1 + 2 d2"))
    sub = verdict.witnesses["substitution"]
    assert sub["matrix"] == [[1, 1], [0, 1]]
    assert sub["root"] == {"r": -1, "s": 1}
    assert (sub["alpha"], sub["beta"], sub["p"]) == (2, 0, 1)


def test_rescue_reports_the_substitution():
    verdict = classify(_ops("d1^2 + 2 d1 d2 + d2^2", "d1 + d2"))
    assert verdict.witnesses["substitution"]["matrix"] == [[1, 1], [0, 1]]
    assert try_substitution(_ops("d1^2 + 2 d1 d2 + d2^2", "d1 + d2")) is None


def test_inexact_pair_stays_undecided_with_reasons():
    verdict = classify(_ops("id", "d1 + 1.41421356 d2"))
    assert verdict.inexact
    assert any("inexact" in reason for reason in verdict.witnesses["reasons"])


def test_parabola_zero_set_is_heuristic():
    verdict = zero_set_rule(parse_operator("2*pi*i*d1 - d2^2"))
    assert verdict.witnesses["heuristic"] is True
    assert verdict.witnesses["zeroSetCounts"] == {"16": 9, "32": 11, "64": 17, "128": 23}
    assert verdict.witnesses["zeroSetSample"][0] == [0, 0]


def test_theorem_main_needs_two_independent_parts():
    ops = _ops("d1^2 + d2^2", "d1^2 + d2^2 + d1")
    assert check_theorem_main(ops, build_diagram(ops)) is None
    ops = _ops("d1^2 + d2", "d2^2")
    witness = check_theorem_main(ops, build_diagram(ops))
    assert witness is not None
    assert witness.indices == (0, 1)


def test_normalization_leaves_one_principal_part():
    ops = _ops("d1^2 + d2^2 + d1", "2 d1^2 + 2 d2^2 + d2")
    normalized = normalize_collection(ops, build_diagram(ops))
    assert normalized[0] == ops[0]
    assert normalized[1] == parse_operator("d2 - 2 d1")


def test_ellipticity_on_quadratic_segments():
    segment = (MultiIndex(2, 0), MultiIndex(0, 2))
    elliptic, roots = ellipticity_check(parse_operator("d1^2 + d2^2"), segment, 2)
    assert elliptic
    assert len(roots) == 2
    elliptic, _ = ellipticity_check(parse_operator("d1^2 - d2^2"), segment, 2)
    assert not elliptic
    assert ellipticity_check(parse_operator("d1"), (MultiIndex(1, 0),) * 2, 0) == (True, [])


def test_directional_rule_rejects_repeated_directions():
    assert directional_rule(_ops("d1^2 + 2 d1 d2 + d2^2")) is None
    assert directional_rule(_ops("d1 d2 + d1", "id")) is None
    verdict = directional_rule(_ops("d1 d2 + d1", "id", "d1"))
    assert verdict is not None
    assert verdict.witnesses["directions"] == [[0, 1], [1, 0]]
    assert verdict.witnesses["divisorRank"] == 2


def test_recombination_does_not_change_the_verdict():
    ops = _ops("d1", "d2")
    mixed = [ops[0] + ops[1], ops[0] - ops[1].scale(3)]
    assert classify(mixed).outcome is Outcome.NOT_COMPLEMENTED


def test_empty_and_zero_collections_are_rejected():
    with pytest.raises(EmptyCollection):
        classify([])
    with pytest.raises(EmptyCollection):
        classify([DiffOperator.zero()])


def test_json_shape():
    options = ClassifyOptions(zero_set_box=32)
    payload = verdict_to_json(classify(_ops("d1 d2"), options))
    assert sorted(payload) == ["inexact", "outcome", "rule", "witnesses"]
    assert payload["outcome"] == "IsomorphicCK"
