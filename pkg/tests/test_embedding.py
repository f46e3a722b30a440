import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from smoothspace.embedding import (
    EmbeddingProblem,
    annihilation_residual,
    combine,
    combined_identity_residual,
    embedding_ratio,
    forward_system,
    l1_derivative_ratio,
    recover_from_combinations,
    solve_system,
)
from smoothspace.errors import NotProper, ResidualTooLarge
from smoothspace.exact import ExactComplex
from smoothspace.harness import random_proper_trigpoly
from smoothspace.models import load_embedding_problem
from smoothspace.trig import TrigPoly

FIXTURES = Path(__file__).parent / "fixtures"


def _phis() -> list[TrigPoly]:
    return [
        TrigPoly.from_terms({(1, 2): 3, (-1, 1): Fraction(1, 2)}),
        TrigPoly.from_terms({(2, -1): ExactComplex.of(1, -1)}),
    ]


def test_forward_then_solve_is_exact():
    phis = _phis()
    problem = forward_system(1, 2, phis)
    assert problem.N == 2
    assert problem.exact
    assert annihilation_residual(problem) == 0.0
    assert solve_system(problem) == phis


def test_perturbed_problem_is_rejected():
    problem = load_embedding_problem(FIXTURES / "embedding_single_mode.json")
    bumped = problem.mus[1] + TrigPoly.monomial(1, 1)
    perturbed = EmbeddingProblem(k=1, l=1, N=1, mus=[problem.mus[0], bumped])
    assert annihilation_residual(perturbed) == pytest.approx(2 * math.pi)
    with pytest.raises(ResidualTooLarge):
        solve_system(perturbed)


def test_random_round_trips_and_unit_perturbations():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        N = int(rng.integers(1, 5))
        k, l = (int(v) for v in rng.integers(1, 6, size=2))
        phis = [random_proper_trigpoly(rng, int(rng.integers(1, 17))) for _ in range(N)]
        problem = forward_system(k, l, phis)
        assert annihilation_residual(problem) == 0.0
        assert solve_system(problem) == phis

        j = int(rng.integers(0, N + 1))
        support = problem.support()
        m, n = support[int(rng.integers(0, len(support)))]
        mus = list(problem.mus)
        mus[j] = mus[j] + TrigPoly.monomial(m, n)
        perturbed = EmbeddingProblem(k=k, l=l, N=N, mus=mus)
        assert annihilation_residual(perturbed) > 0.0
        with pytest.raises(ResidualTooLarge):
            solve_system(perturbed)


def test_single_mode_ratio():
    problem = load_embedding_problem(FIXTURES / "embedding_single_mode.json")
    assert solve_system(problem) == [TrigPoly.monomial(1, 1)]
    ratio = embedding_ratio(problem)
    assert ratio == pytest.approx(1 / (4 * math.pi))
    scaled = EmbeddingProblem(k=1, l=1, N=1, mus=[mu.scale(7) for mu in problem.mus])
    assert embedding_ratio(scaled) == pytest.approx(ratio)
    first, second = l1_derivative_ratio(problem)
    assert first == pytest.approx(ratio)
    assert second == pytest.approx(ratio)


def test_parity_flag():
    phi = [TrigPoly.monomial(1, 1)]
    assert forward_system(1, 2, phi).parity_verified
    assert not forward_system(2, 2, phi).parity_verified


def test_problem_validation():
    with pytest.raises(NotProper):
        forward_system(1, 1, [TrigPoly.monomial(0, 1)])
    with pytest.raises(ValueError):
        EmbeddingProblem(k=1, l=1, N=2, mus=[TrigPoly()])
    with pytest.raises(ValueError):
        EmbeddingProblem(k=0, l=1, N=1, mus=[TrigPoly(), TrigPoly()])


@pytest.mark.parametrize("s", [1, Fraction(1, 3), -2])
def test_combined_identity_holds(s):
    phis = _phis()
    problem = forward_system(1, 2, phis)
    assert combined_identity_residual(problem, phis, s) == 0.0


def test_recover_from_combinations():
    phis = _phis()
    nodes = [1.0, 2.0]
    psis = [combine(phis, s, start=1) for s in nodes]
    recovered = recover_from_combinations(psis, nodes)
    for want, got in zip(phis, recovered):
        for m, n in {*want.support, *got.support}:
            assert got.coefficient(m, n).isclose(want.coefficient(m, n), abs_tol=1e-9)
    with pytest.raises(ValueError):
        recover_from_combinations(psis, [1.0, 1.0])
