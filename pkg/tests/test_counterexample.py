import math
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

from smoothspace.counterexample import (
    CounterexampleConfig,
    counterexample_run,
    decay_model,
    index_set,
    q_range,
    right_hand_sides,
)
from smoothspace.errors import NeedLargerC, NoIndices
from smoothspace.models import load_counterexample_config

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def case_one():
    cfg = load_counterexample_config(FIXTURES / "counterexample_case1.json")
    return cfg, counterexample_run(cfg)


def test_case_one_bounds(case_one):
    cfg, report = case_one
    assert report.case == "case-1"
    assert report.window == "small_t"
    assert report.cpq_max <= 1.25
    assert report.gamma_min == pytest.approx(1.0)
    assert report.coef_min == pytest.approx(1.0)
    assert report.parity_verified
    assert cfg.delta == Fraction(1, 4)


def test_case_one_partial_sums_grow_logarithmically(case_one):
    _, report = case_one
    sums = dict(zip(report.ladder, report.partial_sums))
    assert 64 in sums and 4096 in sums
    assert 1.7 <= sums[4096] / sums[64] <= 2.3
    assert sums[4096] - sums[2048] == pytest.approx(math.log(2) / 8, abs=1e-2)
    assert all(a <= b for a, b in zip(report.partial_sums, report.partial_sums[1:]))


def test_small_t_window():
    cfg = CounterexampleConfig(k=1, l=1, N=1, a1=[0, 1])
    assert q_range(cfg, 64) == (8, 16)
    assert q_range(cfg, 2) == (1, 0)
    p, q = index_set(CounterexampleConfig(k=1, l=1, N=1, pmax=8))
    assert p.tolist() == [4, 5, 6, 7, 8, 8]
    assert q.tolist() == [1, 1, 1, 1, 1, 2]


def test_right_hand_sides_are_affine_in_c():
    cfg = CounterexampleConfig(k=1, l=1, N=1, a1=[0, 1])
    mus = right_hand_sides(cfg)
    c, xi, eta, rho, kappa = sympy.symbols("c xi eta rho kappa")
    assert sympy.expand(mus[0] - (1 + xi + eta * c)) == 0
    assert sympy.expand(mus[1] - (1 + c + rho + kappa * c)) == 0


def test_case_two_uses_the_literal_window():
    cfg = CounterexampleConfig(k=1, l=1, N=3, j0=1, j1=2, pmax=64)
    report = counterexample_run(cfg)
    assert report.case == "case-2"
    assert report.window == "literal"
    assert report.cpq_max <= 8.0
    assert report.gamma_min == pytest.approx(1.0)


def test_strong_junior_terms_need_a_larger_c():
    cfg = CounterexampleConfig(
        k=1, l=1, N=1, a1=[0, 1], pmax=64, junior={"kappa": decay_model(-1.0, 0.01)}
    )
    with pytest.raises(NeedLargerC):
        counterexample_run(cfg)


def test_config_validation():
    with pytest.raises(NoIndices):
        index_set(CounterexampleConfig(k=1, l=1, N=1, cmin=1, pmax=2))
    with pytest.raises(ValueError):
        CounterexampleConfig(k=1, l=1, N=2, j0=2, j1=1)
    with pytest.raises(ValueError):
        CounterexampleConfig(k=1, l=1, N=1, a1=[1])
    with pytest.raises(ValueError):
        CounterexampleConfig(k=1, l=1, N=1, junior={"zeta": decay_model(1.0, 1.0)})
    assert CounterexampleConfig(k=2, l=2, N=1).p_ladder()[-1] == 4096
    assert CounterexampleConfig(k=1, l=1, N=2, j0=1).case == "intermediate"
