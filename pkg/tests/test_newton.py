from fractions import Fraction

import pytest

from smoothspace.errors import AboveDiagram, AboveLine, EmptyCollection
from smoothspace.newton import (
    admissible_lines,
    build_diagram,
    diagram_from_dict,
    is_concave,
    is_subordinate,
    principal_part,
    segment_senior_part,
    senior_part,
)
from smoothspace.operators import DiffOperator, MultiIndex


def _op(*points: tuple[int, int]) -> DiffOperator:
    return DiffOperator.from_terms({p: 1 for p in points})


def test_three_node_core():
    ops = [_op((2, 0)), _op((1, 2)), _op((0, 3))]
    diagram = build_diagram(ops)
    assert [n.as_tuple() for n in diagram.core_nodes] == [(2, 0), (1, 2), (0, 3)]
    assert [(line.a, line.b) for line in diagram.lines] == [(2, 4), (3, 3)]
    assert diagram.kappas == (1, 1)
    assert [n.as_tuple() for n in diagram.extended_nodes] == [(2, 0), (0, 3)]
    assert is_concave(diagram)


def test_dominated_points_stay_off_the_core():
    diagram = build_diagram([_op((2, 0), (1, 1)), _op((0, 3))])
    assert [n.as_tuple() for n in diagram.core_nodes] == [(2, 0), (0, 3)]
    assert is_subordinate(MultiIndex(1, 1), diagram)
    assert not is_subordinate(MultiIndex(2, 0), diagram)
    assert not diagram.in_region(MultiIndex(3, 0))


def test_no_lines_for_a_chain():
    diagram = build_diagram([_op((1, 1), (1, 0), (0, 0))])
    assert diagram.lines == ()
    assert diagram.core_nodes == (MultiIndex(1, 1),)
    assert admissible_lines(frozenset({MultiIndex(1, 1), MultiIndex(0, 0)})) == []


def test_collinear_points_share_one_line():
    lines = admissible_lines(frozenset(MultiIndex(x, 4 - x) for x in range(5)))
    assert len(lines) == 1
    assert (lines[0].a, lines[0].b) == (Fraction(4), Fraction(4))
    assert lines[0].is_antidiagonal


def test_senior_and_principal_parts():
    op = _op((2, 0), (1, 1), (0, 2), (1, 0))
    diagram = build_diagram([op])
    assert senior_part(op, diagram.lines[0]) == _op((2, 0), (1, 1), (0, 2))
    assert segment_senior_part(op, diagram, 0) == senior_part(op, diagram.lines[0])
    assert principal_part(op, diagram) == _op((2, 0), (1, 1), (0, 2))


def test_parts_reject_points_above():
    diagram = build_diagram([_op((1, 0), (0, 1))])
    with pytest.raises(AboveLine):
        senior_part(_op((2, 0)), diagram.lines[0])
    with pytest.raises(AboveDiagram):
        principal_part(_op((1, 1)), diagram)


def test_empty_collection():
    with pytest.raises(EmptyCollection):
        build_diagram([DiffOperator.zero()])


def test_dict_round_trip():
    diagram = build_diagram([_op((3, 0), (1, 1)), _op((0, 2))])
    assert diagram_from_dict(diagram.as_dict()) == diagram
