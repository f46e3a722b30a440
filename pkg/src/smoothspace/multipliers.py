from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from smoothspace.errors import DenominatorVanishes, NotSubordinate
from smoothspace.newton import build_diagram
from smoothspace.operators import DiffOperator, MultiIndex, charpoly_values

logger = logging.getLogger(__name__)

Real = int | float | Fraction


def _mixed_difference(nu: np.ndarray) -> np.ndarray:
    """delta_x delta_y nu on the grid, index (m, n) holding the difference at (m, n)."""
    return nu[1:, 1:] - nu[1:, :-1] - nu[:-1, 1:] + nu[:-1, :-1]


def _tails(nu: np.ndarray, ms: Sequence[int], m_max: int) -> list[float]:
    """Weighted tails sum_{max(m, n) >= M} log(m+1) log(n+1) |delta delta nu| for each M."""
    diff = np.abs(_mixed_difference(nu))[: m_max + 1, : m_max + 1]
    logs = np.log(np.arange(m_max + 1) + 1.0)
    weighted = diff * logs[:, None] * logs[None, :]
    idx = np.arange(m_max + 1)
    ring = np.maximum(idx[:, None], idx[None, :])
    # totals per value of max(m, n), then reversed cumulative sums give every tail at once
    per_ring = np.bincount(ring.ravel(), weights=weighted.ravel(), minlength=m_max + 1)
    tails = np.cumsum(per_ring[::-1])[::-1]
    out = []
    for big_m in ms:
        if big_m < 0 or big_m > m_max:
            raise ValueError(f"M={big_m} is outside [0, {m_max}]")
        out.append(float(tails[big_m]))
    return out


def _check_multiplier(alpha: Real, beta: Real, a: int, b: int, sign: int) -> None:
    if a < 1 or b < 1:
        raise ValueError(f"Line intercepts must be positive integers, got {(a, b)}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if Fraction(alpha) / a + Fraction(beta) / b >= 1:
        raise NotSubordinate(f"(alpha, beta)=({alpha}, {beta}) is not below the line ({a}, {b})")
    if (-1) ** a != sign * (-1) ** b:
        raise DenominatorVanishes(
            f"(im)^{2 * a} {'+' if sign > 0 else '-'} (in)^{2 * b} vanishes off the origin"
        )


def _multiplier_grid(alpha: Real, beta: Real, a: int, b: int, sign: int, m_max: int) -> np.ndarray:
    axis = np.arange(m_max + 2, dtype=float)
    m, n = axis[:, None], axis[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        num = (1j * m) ** (float(alpha) + a) * (1j * n) ** float(beta)
        den = (1j * m) ** (2 * a) + sign * (1j * n) ** (2 * b)
        nu = num / den
    nu[0, :] = 0
    nu[:, 0] = 0
    return nu


def multiplier_tails(
    num_exponents: tuple[Real, Real],
    line: tuple[int, int],
    sign: int,
    ms: Sequence[int],
    m_max: int = 1024,
) -> list[float]:
    alpha, beta = num_exponents
    a, b = line
    _check_multiplier(alpha, beta, a, b, sign)
    nu = _multiplier_grid(alpha, beta, a, b, sign, m_max)
    tails = _tails(nu, ms, m_max)
    logger.debug("multiplier tails for (%s, %s) over (%d, %d): %s", alpha, beta, a, b, tails)
    return tails


def multiplier_tail(
    num_exponents: tuple[Real, Real],
    line: tuple[int, int],
    sign: int,
    M: int,
    m_max: int = 1024,
) -> float:
    """Abel-summation tail of (im)^{alpha+a} (in)^beta / ((im)^{2a} +- (in)^{2b})."""
    return multiplier_tails(num_exponents, line, sign, [M], m_max)[0]


def resolvent_multiplier_tail(
    k: int, l: int, tau: complex, M: int, m_max: int = 1024
) -> float:
    """Same tail for (2 pi i n)^{l-1} / ((2 pi i m)^k - tau (2 pi i n)^l)."""
    rotated = complex(tau) * 1j ** (l - k)
    if tau == 0 or abs(rotated.real) > 1e-12 * abs(tau):
        raise DenominatorVanishes(f"i^(l-k) * tau = {rotated} is not a nonzero imaginary number")
    axis = np.arange(m_max + 2, dtype=float)
    m, n = axis[:, None], axis[None, :]
    u = 2j * math.pi * m
    v = 2j * math.pi * n
    with np.errstate(divide="ignore", invalid="ignore"):
        nu = v ** (l - 1) / (u**k - complex(tau) * v**l)
    nu[0, :] = 0
    nu[:, 0] = 0
    return _tails(nu, [M], m_max)[0]


def _annulus_points(big_m: int) -> tuple[np.ndarray, np.ndarray]:
    radii = np.geomspace(big_m, 2 * big_m, 17)
    ms: list[np.ndarray] = []
    ns: list[np.ndarray] = []
    for r in radii:
        d = np.geomspace(0.5, r, 64)
        for inner in (d, r - d):
            for s1 in (1.0, -1.0):
                for s2 in (1.0, -1.0):
                    ms.extend([np.full_like(inner, s1 * r), s2 * inner])
                    ns.extend([s2 * inner, np.full_like(inner, s1 * r)])
    m = np.concatenate(ms)
    n = np.concatenate(ns)
    keep = (m != 0) & (n != 0)
    return m[keep], n[keep]


def dominance_constant(
    R: DiffOperator, node: MultiIndex | tuple[int, int], ms: Sequence[int]
) -> list[float]:
    """sup of |m|^x |n|^y / |P_R(m, n)| over annuli M <= max(|m|, |n|) <= 2M, one per M."""
    node = node if isinstance(node, MultiIndex) else MultiIndex(*node)
    diagram = build_diagram([R])
    if node not in diagram.core_nodes:
        raise ValueError(f"{node} is not a core node of the operator's Newton diagram")
    out = []
    for big_m in ms:
        m, n = _annulus_points(big_m)
        values = np.abs(charpoly_values(R, m, n))
        weights = np.abs(m) ** node.x * np.abs(n) ** node.y
        with np.errstate(divide="ignore"):
            ratios = np.where(values == 0, np.inf, weights / np.where(values == 0, 1, values))
        out.append(float(ratios.max()))
    return out
