import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from smoothspace.errors import DegenerateOperator, NotUnimodular
from smoothspace.exact import ExactComplex
from smoothspace.harness import random_unimodular
from smoothspace.operators import (
    DiffOperator,
    MultiIndex,
    charpoly_exact,
    direction_multiplicity,
    directional_operator,
    eval_charpoly,
    matrix_inverse,
    rational_directions,
    span_basis,
    span_rank,
    substitute,
    substitute_all,
    unimodular_completion,
)

D1 = DiffOperator.monomial(1, 0)
D2 = DiffOperator.monomial(0, 1)


def test_composition_multiplies_symbols():
    square = (D1 + D2) ** 2
    assert square == DiffOperator.from_terms({(2, 0): 1, (1, 1): 2, (0, 2): 1})
    assert square.is_homogeneous()
    assert square.order() == 2
    assert eval_charpoly(square, 1, -1) == 0


def test_zero_operator_has_no_order():
    with pytest.raises(DegenerateOperator):
        DiffOperator.zero().order()


def test_charpoly_exact_keeps_pi():
    assert charpoly_exact(D1 * D2, 1, 1) == ExactComplex.of(-4, 0, 2)
    assert charpoly_exact(D1.scale(ExactComplex.of(0, 2, 1)) - D2**2, 1, 1).is_zero()


def test_substitution_moves_the_double_root_to_an_axis():
    assert substitute((D1 + D2) ** 2, 1, 1, 0, 1) == D2**2
    with pytest.raises(NotUnimodular):
        substitute(D1, 2, 0, 0, 1)


def test_unimodular_completion_examples():
    assert unimodular_completion(-1, 1) == ((1, 1), (0, 1))
    assert substitute_all([directional_operator((2, 3))], unimodular_completion(2, 3)) == [D2]


@settings(max_examples=60, deadline=None)
@given(
    st.tuples(st.integers(-7, 7), st.integers(1, 7)).filter(
        lambda d: math.gcd(*d) == 1
    )
)
def test_completion_sends_every_direction_to_d2(direction):
    (m11, m12), (m21, m22) = unimodular_completion(*direction)
    assert abs(m11 * m22 - m12 * m21) == 1
    assert substitute(directional_operator(direction), m11, m12, m21, m22) == D2


def test_rational_directions_of_three_lines():
    op = D1**2 * D2 + D1 * D2**2
    assert rational_directions(op) == [((-1, 1), 1), ((0, 1), 1), ((1, 0), 1)]
    assert direction_multiplicity((D1 + D2) ** 2, (-1, 1)) == 2
    assert direction_multiplicity(D1 + D2.scale(2), (-1, 1)) == 0


def test_span_rank_exact_and_inexact():
    assert span_rank([D1, D2, D1 + D2]) == 2
    basis, rank, transform = span_basis([D1 + D2, D1 - D2])
    assert rank == 2
    assert set(basis) == {D1, D2}
    assert len(transform) == 2
    fuzzy = [D1 + D2.scale(1.5), D1.scale(2.0) + D2.scale(3.0)]
    assert span_rank(fuzzy) == 1


def test_chop_drops_tiny_inexact_coefficients():
    op = D1.scale(1.0) + D2.scale(1e-14)
    assert op.chop(1e-10) == D1.scale(1.0)
    assert (D1 + D2).chop(1.0) == D1 + D2


def test_dict_round_trip():
    op = D1.scale(ExactComplex.of(1, 2, -1)) - D2**3
    assert DiffOperator.from_dict(op.as_dict()) == op
    assert MultiIndex(2, 1).order == 3


def test_inexact_rank_counts_every_pivot():
    assert span_rank([D1, D2]) == 2
    inexact = [D1.scale(1.0), D2.scale(1.0)]
    basis, rank, transform = span_basis(inexact)
    assert rank == 2
    assert len(basis) == 2
    assert len(transform) == 2
    assert span_rank([DiffOperator.identity(), D1 + D2.scale(1.41421356)]) == 2
    assert span_rank([D1.scale(1.0), D2.scale(2.0), D1 + D2.scale(2.0)]) == 2


small_operators = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.integers(-5, 5).filter(bool),
    min_size=1,
    max_size=5,
).map(DiffOperator.from_terms)
unimodular_matrices = st.integers(0, 2**32 - 1).map(
    lambda seed: random_unimodular(np.random.default_rng(seed))
)


@settings(max_examples=100, deadline=None)
@given(small_operators, unimodular_matrices)
def test_inverse_substitution_restores_the_operator(op, matrix):
    moved = substitute_all([op], matrix)[0]
    assert substitute_all([moved], matrix_inverse(matrix))[0] == op


@settings(max_examples=100, deadline=None)
@given(
    small_operators,
    small_operators,
    st.fractions(min_value=-5, max_value=5, max_denominator=7),
    st.integers(-4, 4),
    st.integers(-4, 4),
)
def test_charpoly_is_linear_in_the_operator(a, b, c, m, n):
    combined = a + b.scale(c)
    assume(not combined.is_zero())
    lhs = charpoly_exact(combined, m, n)
    assert lhs == charpoly_exact(a, m, n) + charpoly_exact(b, m, n) * c
    expected = eval_charpoly(a, m + 0.5, n) + float(c) * eval_charpoly(b, m + 0.5, n)
    assert eval_charpoly(combined, m + 0.5, n) == pytest.approx(expected, rel=1e-9, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.lists(small_operators, min_size=1, max_size=4), unimodular_matrices)
def test_span_rank_survives_substitution(ops, matrix):
    assert span_rank(substitute_all(ops, matrix)) == span_rank(ops)
