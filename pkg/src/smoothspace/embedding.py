from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from smoothspace.errors import FinalEquationViolated, NotProper, ResidualTooLarge
from smoothspace.exact import ZERO, ExactComplex, Scalar, two_pi_i_power
from smoothspace.operators import DiffOperator
from smoothspace.trig import Freq, TrigPoly, apply_operator, l1_norm, sobolev_norm

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class EmbeddingProblem:
    """The chain -d1^k phi_1 = mu_0, d2^l phi_j - d1^k phi_{j+1} = mu_j, d2^l phi_N = mu_N."""

    k: int
    l: int
    N: int
    mus: list[TrigPoly] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.k < 1 or self.l < 1 or self.N < 1:
            raise ValueError(f"k, l, N must be positive, got {(self.k, self.l, self.N)}")
        if len(self.mus) != self.N + 1:
            raise ValueError(f"Expected {self.N + 1} right-hand sides, got {len(self.mus)}")
        for j, mu in enumerate(self.mus):
            if not mu.is_proper():
                raise NotProper(f"mu_{j} has Fourier coefficients on a coordinate axis")

    @property
    def exact(self) -> bool:
        return all(mu.exact for mu in self.mus)

    @property
    def parity_verified(self) -> bool:
        """False for even k and even l, a case the embedding theorem leaves unproved."""
        return self.k % 2 == 1 or self.l % 2 == 1

    def support(self) -> list[Freq]:
        return sorted({key for mu in self.mus for key in mu.coeffs})

    def as_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "l": self.l,
            "N": self.N,
            "mus": [mu.as_rows() for mu in self.mus],
        }


def _d1(k: int) -> DiffOperator:
    return DiffOperator.monomial(k, 0)


def _d2(l: int) -> DiffOperator:
    return DiffOperator.monomial(0, l)


def forward_system(k: int, l: int, phis: Sequence[TrigPoly]) -> EmbeddingProblem:
    if not phis:
        raise ValueError("forward_system needs at least one phi")
    for j, phi in enumerate(phis, start=1):
        if not phi.is_proper():
            raise NotProper(f"phi_{j} is not proper")
    d1, d2 = _d1(k), _d2(l)
    n = len(phis)
    mus = [-apply_operator(d1, phis[0])]
    for j in range(n - 1):
        mus.append(apply_operator(d2, phis[j]) - apply_operator(d1, phis[j + 1]))
    mus.append(apply_operator(d2, phis[-1]))
    return EmbeddingProblem(k=k, l=l, N=n, mus=mus)


def _symbols(p: EmbeddingProblem, m: int, n: int) -> tuple[ExactComplex, ExactComplex]:
    if p.exact:
        return two_pi_i_power(m, p.k), two_pi_i_power(n, p.l)
    return (
        ExactComplex.from_complex((2j * np.pi * m) ** p.k),
        ExactComplex.from_complex((2j * np.pi * n) ** p.l),
    )


def _annihilation_terms(p: EmbeddingProblem, m: int, n: int) -> list[ExactComplex]:
    a, b = _symbols(p, m, n)
    return [a**j * b ** (p.N - j) * mu.coefficient(m, n) for j, mu in enumerate(p.mus)]


def annihilation_residual(p: EmbeddingProblem) -> float:
    """max over the joint support of |sum_j (2 pi i m)^{jk} (2 pi i n)^{(N-j)l} mu_j(m, n)|."""
    worst = 0.0
    for m, n in p.support():
        total = sum(_annihilation_terms(p, m, n), ZERO)
        if not total.is_zero():
            worst = max(worst, abs(total))
    return worst


def _annihilation_scale(p: EmbeddingProblem) -> float:
    scale = 0.0
    for m, n in p.support():
        scale = max(scale, sum(abs(t) for t in _annihilation_terms(p, m, n)))
    return scale


def solve_system(p: EmbeddingProblem, tol: float = 1e-9) -> list[TrigPoly]:
    residual = annihilation_residual(p)
    scale = _annihilation_scale(p)
    allowed = 0.0 if p.exact else tol * max(1.0, scale)
    if residual > allowed:
        raise ResidualTooLarge(f"Annihilation residual {residual:.3e} exceeds {allowed:.3e}")
    columns: list[dict[Freq, ExactComplex]] = [{} for _ in range(p.N)]
    for m, n in p.support():
        a, b = _symbols(p, m, n)
        phi = -p.mus[0].coefficient(m, n) / a
        columns[0][(m, n)] = phi
        for j in range(1, p.N):
            phi = (b * phi - p.mus[j].coefficient(m, n)) / a
            columns[j][(m, n)] = phi
        gap = b * phi - p.mus[p.N].coefficient(m, n)
        bound = 0.0 if p.exact else tol * max(1.0, scale)
        if not gap.is_zero() and abs(gap) > bound:
            raise FinalEquationViolated(
                f"d2^l phi_N differs from mu_N by {abs(gap):.3e} at {(m, n)}"
            )
    logger.debug("solved chain of length %d on %d frequencies", p.N, len(p.support()))
    return [TrigPoly(column) for column in columns]


def embedding_ratio(p: EmbeddingProblem, oversample: int = 8, tol: float = 1e-9) -> float:
    phis = solve_system(p, tol)
    alpha, beta = (p.k - 1) / 2, (p.l - 1) / 2
    numerator = sum(sobolev_norm(phi, alpha, beta) for phi in phis)
    denominator = sum(l1_norm(mu, oversample) for mu in p.mus)
    if denominator == 0.0:
        raise ValueError("Embedding ratio of the zero problem is undefined")
    return numerator / denominator


def l1_derivative_ratio(
    p: EmbeddingProblem, oversample: int = 8, tol: float = 1e-9
) -> tuple[float, float]:
    """L1 norms of d1^{k-1} phi_j and d2^{l-1} phi_j, each summed and divided by sum ||mu_j||."""
    phis = solve_system(p, tol)
    denominator = sum(l1_norm(mu, oversample) for mu in p.mus)
    if denominator == 0.0:
        raise ValueError("Derivative ratio of the zero problem is undefined")
    first = sum(l1_norm(apply_operator(_d1(p.k - 1), phi), oversample) for phi in phis)
    second = sum(l1_norm(apply_operator(_d2(p.l - 1), phi), oversample) for phi in phis)
    return first / denominator, second / denominator


def combine(fs: Sequence[TrigPoly], s: Scalar, start: int = 0) -> TrigPoly:
    """sum_i s^(start + i) fs[i]."""
    weight = ExactComplex.coerce(s)
    total = TrigPoly()
    for i, f in enumerate(fs):
        total = total + f.scale(weight ** (start + i))
    return total


def combined_identity_residual(p: EmbeddingProblem, phis: Sequence[TrigPoly], s: Scalar) -> float:
    """max |(d1^k - s d2^l) psi_s + s M_s| with psi_s = sum s^j phi_j and M_s = sum s^j mu_j."""
    weight = ExactComplex.coerce(s)
    psi = combine(phis, weight, start=1)
    big_m = combine(p.mus, weight)
    lhs = apply_operator(_d1(p.k), psi) - apply_operator(_d2(p.l), psi).scale(weight)
    gap = lhs + big_m.scale(weight)
    return max((abs(c) for c in gap.coeffs.values()), default=0.0)


def recover_from_combinations(psis: Sequence[TrigPoly], nodes: Sequence[complex]) -> list[TrigPoly]:
    """Invert psi_{s_i} = sum_j s_i^j phi_j (j = 1..N) for pairwise distinct nonzero nodes."""
    count = len(nodes)
    if len(psis) != count or count == 0:
        raise ValueError("Need one combination per node")
    values = np.array(nodes, dtype=complex)
    if np.any(values == 0) or len(set(values.tolist())) != count:
        raise ValueError("Nodes must be pairwise distinct and nonzero")
    vander = values[:, None] ** np.arange(1, count + 1)[None, :]
    support = sorted({key for psi in psis for key in psi.coeffs})
    rhs = np.array(
        [[psi.coefficient(m, n).to_complex() for m, n in support] for psi in psis],
        dtype=complex,
    ).reshape(count, len(support))
    solution = np.linalg.solve(vander, rhs)
    return [
        TrigPoly(
            {key: ExactComplex.from_complex(v) for key, v in zip(support, row) if v != 0}
        )
        for row in solution
    ]
