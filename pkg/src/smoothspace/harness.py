from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
import sympy

from smoothspace.classifier import ClassifyOptions, Outcome, classify
from smoothspace.embedding import embedding_ratio, forward_system
from smoothspace.operators import DiffOperator, Matrix2, substitute_all
from smoothspace.parser import parse_operator
from smoothspace.trig import TrigPoly

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class BatteryCase:
    name: str
    exprs: tuple[str, ...]
    expected: Outcome
    inexact: bool = False

    def operators(self) -> list[DiffOperator]:
        return [parse_operator(text) for text in self.exprs]


BATTERY = (
    BatteryCase("gradient", ("d1", "d2"), Outcome.NOT_COMPLEMENTED),
    BatteryCase("anisotropic", ("d1^3", "d2^2"), Outcome.NOT_COMPLEMENTED),
    BatteryCase(
        "square-and-skew-line", ("d1^2 + 2 d1 d2 + d2^2", "d1 + 2 d2"), Outcome.NOT_COMPLEMENTED
    ),
    BatteryCase("square-and-its-root", ("d1^2 + 2 d1 d2 + d2^2", "d1 + d2"), Outcome.ISOMORPHIC_CK),
    BatteryCase("parabola", ("2*pi*i*d1 - d2^2",), Outcome.NOT_COMPLEMENTED),
    BatteryCase("irrational-pair", ("id", "d1 + 1.41421356 d2"), Outcome.UNDECIDED, inexact=True),
    BatteryCase("three-directions", ("d1^2 d2 + d1 d2^2", "id", "d1"), Outcome.ISOMORPHIC_CK),
)


@dataclass(slots=True)
class SelftestConfig:
    seed: int = 0
    invariance: bool = False
    recombinations: int = 20
    substitutions: int = 20
    options: ClassifyOptions = field(default_factory=ClassifyOptions)


PHASES = [
    "Phase 1: Classify the example battery",
    "Phase 2: Re-classify under random recombinations and unimodular substitutions",
]


@dataclass(slots=True)
class CaseResult:
    name: str
    expected: str
    outcome: str
    rule: str | None
    ok: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "expected": self.expected,
            "outcome": self.outcome,
            "rule": self.rule,
            "ok": self.ok,
        }


@dataclass(slots=True)
class SelftestReport:
    cases: list[CaseResult]
    invariance_failures: list[dict[str, Any]]
    elapsed: float

    @property
    def ok(self) -> bool:
        return all(case.ok for case in self.cases) and not self.invariance_failures

    def as_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "cases": [case.as_dict() for case in self.cases],
            "invarianceFailures": self.invariance_failures,
            "elapsedSeconds": round(self.elapsed, 3),
        }


def _agrees(case: BatteryCase, ops: Sequence[DiffOperator], options: ClassifyOptions) -> CaseResult:
    verdict = classify(ops, options)
    ok = verdict.outcome is case.expected and verdict.inexact == case.inexact
    return CaseResult(case.name, str(case.expected), str(verdict.outcome), verdict.rule, ok)


# -- random generators -----------------------------------------------------------------


def random_unimodular(rng: np.random.Generator, bound: int = 3) -> Matrix2:
    """Integer 2x2 matrix with entries in [-bound, bound] and determinant +-1."""
    while True:
        m11, m12, m21, m22 = (int(v) for v in rng.integers(-bound, bound + 1, size=4))
        if abs(m11 * m22 - m12 * m21) == 1:
            return ((m11, m12), (m21, m22))


def random_recombination(rng: np.random.Generator, size: int, bound: int = 3) -> list[list[int]]:
    """Invertible integer matrix; the determinant is checked exactly."""
    while True:
        rows = [[int(v) for v in rng.integers(-bound, bound + 1, size=size)] for _ in range(size)]
        if sympy.Matrix(rows).det() != 0:
            return rows


def recombine(ops: Sequence[DiffOperator], matrix: Sequence[Sequence[int]]) -> list[DiffOperator]:
    out = []
    for row in matrix:
        acc = DiffOperator.zero()
        for weight, op in zip(row, ops):
            if weight:
                acc = acc + op.scale(weight)
        out.append(acc)
    return out


def random_proper_trigpoly(
    rng: np.random.Generator, radius: int, terms: int = 6, bound: int = 9
) -> TrigPoly:
    """Rational coefficients on random frequencies of [-radius, radius]^2 off the axes."""
    if radius < 1:
        raise ValueError(f"radius must be positive, got {radius}")
    terms = min(terms, (2 * radius) ** 2)
    acc: dict[tuple[int, int], Fraction] = {}
    while len(acc) < terms:
        m, n = (int(v) for v in rng.integers(-radius, radius + 1, size=2))
        if m == 0 or n == 0:
            continue
        num = int(rng.integers(-bound, bound + 1)) or 1
        acc[(m, n)] = Fraction(num, int(rng.integers(1, bound + 1)))
    return TrigPoly.from_terms(acc)


# -- invariance and envelopes ----------------------------------------------------------


def invariance_suite(config: SelftestConfig) -> list[dict[str, Any]]:
    """Verdicts of the battery must survive recombination and change of angular variables."""
    rng = np.random.default_rng(config.seed)
    failures: list[dict[str, Any]] = []
    for case in BATTERY:
        ops = case.operators()
        trials: list[tuple[str, Any, list[DiffOperator]]] = []
        for _ in range(config.recombinations):
            matrix = random_recombination(rng, len(ops))
            trials.append(("recombination", matrix, recombine(ops, matrix)))
        for _ in range(config.substitutions):
            unimodular = random_unimodular(rng)
            trials.append(("substitution", unimodular, substitute_all(ops, unimodular)))
        for kind, matrix, transformed in trials:
            result = _agrees(case, transformed, config.options)
            if not result.ok:
                logger.debug("%s %s broke %s: %s", kind, matrix, case.name, result.outcome)
                failures.append(
                    {
                        "case": case.name,
                        "kind": kind,
                        "matrix": [list(row) for row in matrix],
                        "outcome": result.outcome,
                    }
                )
    return failures


def run_selftest(config: SelftestConfig | None = None) -> SelftestReport:
    config = config or SelftestConfig()
    start = time.perf_counter()
    logger.info(PHASES[0])
    cases = [_agrees(case, case.operators(), config.options) for case in BATTERY]
    failures: list[dict[str, Any]] = []
    if config.invariance:
        logger.info(PHASES[1])
        failures = invariance_suite(config)
    return SelftestReport(cases, failures, time.perf_counter() - start)


@dataclass(slots=True)
class EnvelopeReport:
    k: int
    l: int
    radii: list[int]
    max_ratios: list[float]

    @property
    def growth(self) -> list[float]:
        return [b / a for a, b in zip(self.max_ratios, self.max_ratios[1:])]

    def as_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "l": self.l,
            "radii": self.radii,
            "maxRatios": self.max_ratios,
            "growth": self.growth,
        }


def embedding_envelope(
    k: int,
    l: int,
    radii: Sequence[int] = (4, 8, 16, 32),
    samples: int = 8,
    N: int = 1,
    seed: int = 0,
    oversample: int = 8,
) -> EnvelopeReport:
    """Largest embedding ratio over random proper inputs, per support radius."""
    rng = np.random.default_rng(seed)
    maxima = []
    for radius in radii:
        best = 0.0
        for _ in range(samples):
            phis = [random_proper_trigpoly(rng, radius) for _ in range(N)]
            best = max(best, embedding_ratio(forward_system(k, l, phis), oversample))
        logger.debug("envelope k=%d l=%d radius=%d: %.6g", k, l, radius, best)
        maxima.append(best)
    return EnvelopeReport(k, l, list(radii), maxima)
