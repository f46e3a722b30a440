import numpy as np

from smoothspace.parser import parse_operator
from smoothspace.zeroset import LatticeLine, analyze_zero_set, full_lines, zero_points


def test_parabola_zero_set_grows_off_every_line():
    zs = analyze_zero_set(parse_operator("2*pi*i*d1 - d2^2"), box=128)
    assert zs.lines == []
    assert zs.remainder_counts == {16: 9, 32: 11, 64: 17, 128: 23}
    assert all(m == n * n for m, n in zs.points.tolist())


def test_product_vanishes_on_both_axes():
    zs = analyze_zero_set(parse_operator("d1 d2"), box=16)
    assert sorted(line.as_dict()["direction"] for line in zs.lines) == [[0, 1], [1, 0]]
    assert len(zs.remainder()) == 0
    assert set(zs.remainder_counts.values()) == {0}


def test_diagonal_line_is_detected():
    zs = analyze_zero_set(parse_operator("d1 + d2"), box=32)
    assert zs.lines == [LatticeLine(1, -1, 0)]
    assert len(zs.points) == 65


def test_inexact_symbol_only_vanishes_at_the_origin():
    points = zero_points(parse_operator("d1 - 1.41421356 d2"), box=64)
    assert points.tolist() == [[0, 0]]


def test_partial_line_is_not_full():
    points = np.array([[0, 0], [1, 1], [2, 2]])
    assert full_lines(points, box=8) == []
    assert full_lines(np.array([[k, k] for k in range(-8, 9)]), box=8) == [LatticeLine(1, 1, 0)]
