import math

import pytest

from smoothspace.errors import DenominatorVanishes, NotSubordinate
from smoothspace.multipliers import (
    dominance_constant,
    multiplier_tail,
    multiplier_tails,
    resolvent_multiplier_tail,
)
from smoothspace.parser import parse_operator

SCALES = [16, 64, 256, 1024]


def test_product_symbol_is_dominated_uniformly():
    values = dominance_constant(parse_operator("d1 d2"), (1, 1), SCALES)
    assert all(v == pytest.approx(1 / (4 * math.pi**2), abs=1e-12) for v in values)


def test_elliptic_symbol_is_stable():
    values = dominance_constant(parse_operator("d1^2 + d2^2"), (2, 0), SCALES)
    assert max(values) / min(values) < 1.05


def test_square_of_a_line_is_not_dominated():
    values = dominance_constant(parse_operator("d1^2 + 2 d1 d2 + d2^2"), (2, 0), SCALES)
    assert values[-1] >= 10 * values[0]


def test_dominance_needs_a_core_node():
    with pytest.raises(ValueError):
        dominance_constant(parse_operator("d1^2 + d2^2"), (1, 0), SCALES)


def test_tails_shrink():
    tails = multiplier_tails((0, 0), (1, 1), 1, [8, 16, 64, 256], m_max=512)
    assert all(a >= b for a, b in zip(tails, tails[1:]))
    assert tails[-1] < 0.5 * tails[1]
    assert multiplier_tail((0, 0), (1, 1), 1, 16, m_max=512) == pytest.approx(tails[1])
    s8, s64 = multiplier_tails((0, 0), (1, 1), 1, [8, 64])
    assert s64 < 0.5 * s8


def test_multiplier_preconditions():
    with pytest.raises(NotSubordinate):
        multiplier_tails((1, 0), (1, 1), 1, [8])
    with pytest.raises(DenominatorVanishes):
        multiplier_tails((0, 0), (1, 1), -1, [8])
    with pytest.raises(ValueError):
        multiplier_tails((0, 0), (1, 1), 1, [600], m_max=512)


def test_resolvent_tail():
    tail = resolvent_multiplier_tail(1, 1, 1j, 16, m_max=256)
    assert math.isfinite(tail)
    assert tail > 0
    with pytest.raises(DenominatorVanishes):
        resolvent_multiplier_tail(1, 1, 1.0, 16, m_max=256)
